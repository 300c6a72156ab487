#include "mcnet/protocols.hpp"

#include <cmath>
#include <numbers>

namespace mcnet::protocols {

using calculus::CorrectX;
using calculus::CorrectZ;
using calculus::Entangle;
using calculus::Measure;
using calculus::SignalExpr;
using calculus::from_notation_order;
using net::Agent;
using net::ClassicalRecv;
using net::ClassicalSend;
using net::Network;
using net::PatternEvent;
using net::Preparation;
using net::QuantumRecv;
using net::QuantumSend;

Network teleport(const TeleportIds& ids) {
  const auto s1 = calculus::signal_name(ids.input);
  const auto s2 = calculus::signal_name(ids.shared_a);

  Agent a;
  a.name = ids.agent_a;
  a.sort = {ids.input, ids.shared_a};
  // M2^0 M1^0 E12 in notation order: the local Bell measurement
  a.events.push_back(PatternEvent{from_notation_order({
      Measure{ids.shared_a, 0.0, {}, {}},
      Measure{ids.input, 0.0, {}, {}},
      Entangle{ids.input, ids.shared_a},
  })});
  a.events.push_back(
      ClassicalSend{ids.channel, {SignalExpr::name(s2), SignalExpr::name(s1)}});

  Agent b;
  b.name = ids.agent_b;
  b.sort = {ids.shared_b};
  b.events.push_back(ClassicalRecv{ids.channel, {ids.recv_x2, ids.recv_x1}});
  // X3^{x2} Z3^{x1} in notation order
  b.events.push_back(PatternEvent{from_notation_order({
      CorrectX{ids.shared_b, SignalExpr::name(ids.recv_x2)},
      CorrectZ{ids.shared_b, SignalExpr::name(ids.recv_x1)},
  })});

  Network n;
  n.agents = {std::move(a), std::move(b)};
  n.prep = Preparation::entangle({ids.shared_a, ids.shared_b},
                                 {Entangle{ids.shared_a, ids.shared_b}});
  return n;
}

Network direct_channel() {
  Agent a;
  a.name = "A";
  a.sort = {1};
  a.events.push_back(QuantumSend{"qc", 1});

  Agent b;
  b.name = "B";
  b.events.push_back(QuantumRecv{"qc", 1});

  Network n;
  n.agents = {std::move(a), std::move(b)};
  return n;
}

Network bitflip(double alpha, bool observe_outcome) {
  Agent a;
  a.name = "A";
  a.sort = {1};
  if (observe_outcome) a.cout = {"s2"};
  // X1^{s2} M2^{-alpha} in notation order
  a.events.push_back(PatternEvent{from_notation_order({
      CorrectX{1, SignalExpr::name("s2")},
      Measure{2, -alpha, {}, {}},
  })});

  Network n;
  n.agents = {std::move(a)};
  return n;
}

Network hadamard_pair() {
  auto h_agent = [](const std::string& name, qnum::QubitId in, qnum::QubitId out) {
    Agent a;
    a.name = name;
    a.sort = {in};
    // X_out^{s_in} M_in^0 E(in,out) in notation order: H(in,out)
    a.events.push_back(PatternEvent{from_notation_order({
        CorrectX{out, SignalExpr::name(calculus::signal_name(in))},
        Measure{in, 0.0, {}, {}},
        Entangle{in, out},
    })});
    return a;
  };

  Network n;
  n.agents = {h_agent("A", 1, 2), h_agent("B", 3, 4)};
  return n;
}

Network superdense() {
  Agent a;
  a.name = "A";
  a.cin = {"x1", "x2"};
  a.sort = {1};
  // X1^{x2} Z1^{x1} in notation order: encode two bits on the shared half
  a.events.push_back(PatternEvent{from_notation_order({
      CorrectX{1, SignalExpr::name("x2")},
      CorrectZ{1, SignalExpr::name("x1")},
  })});
  a.events.push_back(QuantumSend{"qc", 1});

  Agent b;
  b.name = "B";
  b.cout = {"s1", "s2"};
  b.sort = {2};
  b.events.push_back(QuantumRecv{"qc", 1});
  // Bell measurement decodes: M2^0 M1^0 E12 in notation order
  b.events.push_back(PatternEvent{from_notation_order({
      Measure{2, 0.0, {}, {}},
      Measure{1, 0.0, {}, {}},
      Entangle{1, 2},
  })});

  Network n;
  n.agents = {std::move(a), std::move(b)};
  n.prep = Preparation::entangle({1, 2}, {Entangle{1, 2}});
  return n;
}

namespace {

// Accepts "<float>", "pi", "pi/<d>", "<c>*pi", "<c>*pi/<d>", optional sign.
bool parse_angle_text(const std::string& text, double& out) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  double sign = 1.0;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    if (s[0] == '-') sign = -1.0;
    s = s.substr(1);
  }
  const auto pi_pos = s.find("pi");
  try {
    if (pi_pos == std::string::npos) {
      std::size_t used = 0;
      out = sign * std::stod(s, &used);
      return used == s.size();
    }
    double coef = 1.0;
    std::string head = s.substr(0, pi_pos);
    if (!head.empty()) {
      if (head.back() != '*') return false;
      coef = std::stod(head.substr(0, head.size() - 1));
    }
    double denom = 1.0;
    std::string tail = s.substr(pi_pos + 2);
    if (!tail.empty()) {
      if (tail.front() != '/') return false;
      denom = std::stod(tail.substr(1));
    }
    out = sign * coef * std::numbers::pi / denom;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

bool is_library_name(const std::string& name) {
  if (name == "teleport" || name == "direct_channel" || name == "hadamard_pair" ||
      name == "superdense") {
    return true;
  }
  if (name.rfind("bitflip(", 0) == 0 && name.back() == ')') {
    double ignored;
    return parse_angle_text(name.substr(8, name.size() - 9), ignored);
  }
  return false;
}

Network library(const std::string& name) {
  if (name == "teleport") return teleport();
  if (name == "direct_channel") return direct_channel();
  if (name == "hadamard_pair") return hadamard_pair();
  if (name == "superdense") return superdense();
  if (name.rfind("bitflip(", 0) == 0 && name.back() == ')') {
    double angle;
    if (parse_angle_text(name.substr(8, name.size() - 9), angle)) {
      return bitflip(angle);
    }
  }
  throw UnknownProtocol("unknown protocol " + name);
}

}  // namespace mcnet::protocols
