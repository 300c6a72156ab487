// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exit code = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "mcnet/parser.hpp"
#include "mcnet/protocols.hpp"
#include "mcnet/semantics.hpp"
#include "support/gennet.hpp"
#include "support/oracle.hpp"
#include "support/testutil.hpp"

using namespace mcnet;
using namespace mcnet::sem;
using net::Network;
using oracle::cd;
using qnum::IdList;
using qnum::Matrix;
using qnum::QRegisterState;
using qnum::QubitId;
using qnum::Vector;

namespace {

constexpr double kTol = 1e-9;

struct Harness {
  int failures = 0;

  void report(int num, const std::string& name, bool pass, double seconds,
              const std::string& detail) {
    std::printf("%s criterion %2d: %s (%.2fs)%s%s\n", pass ? "PASS" : "FAIL", num,
                name.c_str(), seconds, detail.empty() ? "" : " :: ",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }

  template <typename Fn>
  void criterion(int num, const std::string& name, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
      detail = fn();
      pass = detail.empty();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    report(num, name, pass, seconds, detail);
  }
};

struct CliResult {
  int exit_code;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(MCNET_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

QRegisterState random_qubit(QubitId id, std::mt19937_64& rng) {
  return testutil::random_pure({id}, rng);
}

std::vector<QRegisterState> product_inputs(const Network& n, std::mt19937_64& rng) {
  std::vector<QRegisterState> out;
  for (std::size_t i = 0; i < n.agents.size(); ++i) {
    const auto ids = n.input_ids(i);
    out.push_back(ids.empty() ? QRegisterState::vacuum()
                              : testutil::random_pure(ids, rng));
  }
  return out;
}

double fidelity(const Vector& psi, const Matrix& rho) {
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

// shared corpus for criteria 5 and 6
struct RandomCase {
  Network network;
  calculus::Env cin;
  std::vector<QRegisterState> qin;
};

std::vector<RandomCase> make_corpus(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  testutil::NetGen gen(rng);
  testutil::NetGenOptions opt;  // <=3 agents, <=6 qubits, <=2 measurements each
  std::vector<RandomCase> corpus;
  while (corpus.size() < count) {
    RandomCase c;
    c.network = gen.generate(opt);
    const auto cins = enumerate_assignments(c.network.all_cin());
    c.cin = cins[rng() % cins.size()];
    c.qin = product_inputs(c.network, rng);
    // keep class probabilities away from zero so per-class state checks stay
    // well conditioned
    auto pts = operational(c.network, c.cin, c.qin);
    bool ok = true;
    for (const auto& [cls, p] : pts.classes) ok = ok && p > 1e-6;
    if (ok) corpus.push_back(std::move(c));
  }
  return corpus;
}

std::string check_teleport_correctness() {
  Network tp = protocols::teleport();
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    QRegisterState psi = random_qubit(1, rng);
    auto pts = operational(tp, {}, {psi, QRegisterState::vacuum()});
    if (pts.classes.size() != 1) return "more than one final class";
    const auto& [cls, prob] = pts.classes[0];
    if (std::abs(prob - 1.0) > kTol) return "class probability differs from 1";
    if (!(cls.sorts[0].empty() && cls.sorts[1] == std::set<QubitId>{3})) {
      return "qubit did not end up in B's sort {3}";
    }
    const double f = fidelity(psi.amplitudes(), cls.qfinal.density());
    if (f < 1.0 - kTol) return "fidelity " + std::to_string(f);
  }
  return "";
}

std::string check_bisimilarity() {
  auto good = run_cli("equiv teleport direct_channel");
  if (good.exit_code != 0) {
    return "cli equiv exited with " + std::to_string(good.exit_code);
  }
  const auto doc = nlohmann::json::parse(good.output);
  if (std::stod(doc.at("max_choi_distance").get<std::string>()) >= kTol) {
    return "Choi distance too large: " + doc.at("max_choi_distance").get<std::string>();
  }

  // dropping the Z correction must break the equivalence, with a witness
  Network broken = protocols::teleport();
  broken.agents[1].events[1] =
      net::PatternEvent{{calculus::CorrectX{3, calculus::SignalExpr::name("x2")}}};
  auto res = equivalent(broken, protocols::direct_channel(), kTol);
  if (res.equivalent) return "mutated teleport still reported equivalent";
  if (res.witness.empty()) return "missing witness for the mutated teleport";

  const auto tmp = std::filesystem::temp_directory_path() / "mcnet_broken_tp.mq";
  std::ofstream(tmp) << dsl::render_network(broken, "broken");
  auto bad = run_cli("equiv " + tmp.string() + " direct_channel");
  if (bad.exit_code != 1) {
    return "cli equiv on the broken network exited with " +
           std::to_string(bad.exit_code);
  }
  return "";
}

std::string check_four_branches() {
  Network tp = protocols::teleport();
  std::mt19937_64 rng(303);
  RunOptions opts;
  opts.keep_paths = true;
  auto pts = run_schedule(tp, {}, {random_qubit(1, rng), QRegisterState::vacuum()},
                          Schedule::canonical(tp), opts);
  if (pts.paths.size() != 4) {
    return "expected 4 paths, got " + std::to_string(pts.paths.size());
  }
  for (const auto& p : pts.paths) {
    if (std::abs(p.lambda - 0.25) > kTol) {
      return "path probability " + std::to_string(p.lambda);
    }
  }
  return "";
}

// trace of the restricted operation on a normalized input; the bit-flip
// elements are proportional to unitaries so any input works
double group_trace_on_identity(const DenotationGroup& g) {
  double tr = 0.0;
  for (const auto& l : g.kraus.elements) {
    tr += (l.matrix.adjoint() * l.matrix).trace().real() /
          double(l.matrix.cols());
  }
  return tr;
}

std::string check_bitflip_channel() {
  for (const double alpha :
       {0.0, std::numbers::pi / 4, std::numbers::pi / 2, std::numbers::pi}) {
    // independent oracle: overlap of the rotated ancilla projector with |+>
    const auto branch0 = oracle::project(oracle::plus_state(), 1, 0, -alpha, 0);
    const double p_oracle = oracle::norm2(branch0);
    if (std::abs(p_oracle - std::cos(alpha / 2) * std::cos(alpha / 2)) > 1e-12) {
      return "oracle disagrees with cos^2(alpha/2)";
    }

    Denotation d = denotational(protocols::bitflip(alpha));
    const auto& groups = d.table[0].groups;

    // zero-probability classes are pruned: alpha=0 and alpha=pi degenerate to
    // a single class of probability 1
    std::size_t expected = 0;
    if (p_oracle > qnum::kPruneTol) ++expected;
    if (1.0 - p_oracle > qnum::kPruneTol) ++expected;
    if (groups.size() != expected) {
      return "alpha=" + std::to_string(alpha) + ": expected " +
             std::to_string(expected) + " classes, got " +
             std::to_string(groups.size());
    }
    if (expected == 1 &&
        std::abs(group_trace_on_identity(groups[0]) - 1.0) > kTol) {
      return "alpha=" + std::to_string(alpha) +
             ": degenerate class probability differs from 1";
    }
    for (const auto& g : groups) {
      const int s2 = g.signal_outs.at("s2");
      const double want = s2 ? 1.0 - p_oracle : p_oracle;
      if (std::abs(group_trace_on_identity(g) - want) > kTol) {
        return "alpha=" + std::to_string(alpha) + ": class probability mismatch";
      }
      qnum::KrausSet target{{qnum::LinOp{
          {1}, {1},
          std::sqrt(want) * (s2 ? qnum::pauli_x() : Matrix::Identity(2, 2))}}};
      if (qnum::frob_dist(qnum::choi(g.kraus), qnum::choi(target)) > kTol) {
        return "alpha=" + std::to_string(alpha) + ": class channel mismatch";
      }
    }
  }
  return "";
}

std::string check_schedule_independence(const std::vector<RandomCase>& corpus) {
  {
    Network hh = protocols::hadamard_pair();
    std::mt19937_64 rng(404);
    auto res = check_schedules(hh, {}, product_inputs(hh, rng));
    if (!res.pass || res.truncated) return "hadamard_pair: " + res.witness;
    if (res.interleavings < 2) return "hadamard_pair explored one interleaving";
  }
  {
    Network tp = protocols::teleport();
    std::mt19937_64 rng(405);
    auto res = check_schedules(tp, {}, {random_qubit(1, rng), QRegisterState::vacuum()});
    if (!res.pass || res.truncated) return "teleport: " + res.witness;
  }
  {
    Network sd = protocols::superdense();
    for (const auto& cin : enumerate_assignments(sd.all_cin())) {
      auto res = check_schedules(sd, cin,
                                 {QRegisterState::vacuum(), QRegisterState::vacuum()});
      if (!res.pass || res.truncated) return "superdense: " + res.witness;
    }
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto res = check_schedules(corpus[i].network, corpus[i].cin, corpus[i].qin, 50000);
    if (!res.pass) return "random network " + std::to_string(i) + ": " + res.witness;
    if (res.truncated) return "random network " + std::to_string(i) + ": truncated";
  }
  return "";
}

std::string check_correspondence(const std::vector<RandomCase>& corpus) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& c = corpus[i];
    const std::string tag = "random network " + std::to_string(i) + ": ";

    Denotation d = denotational(c.network);
    auto pts = operational(c.network, c.cin, c.qin);

    QRegisterState rho = QRegisterState::vacuum();
    for (const auto& s : c.qin) rho = qnum::tensor(rho, s);

    const auto& entry = d.entry(c.cin);
    double total_prob = 0.0;
    for (const auto& [cls, prob] : pts.classes) {
      total_prob += prob;
      calculus::Env outs;
      for (const auto& per_agent : cls.couts) {
        for (const auto& [k, v] : per_agent) outs[k] = v;
      }
      const DenotationGroup* group = nullptr;
      for (const auto& g : entry.groups) {
        if (g.outs == outs) {
          group = &g;
          break;
        }
      }
      if (!group) return tag + "no restricted class for an operational class";

      double tr = 0.0;
      Matrix image;
      bool first = true;
      IdList order = cls.qfinal.ids();
      for (const auto& l : group->kraus.elements) {
        auto branch = qnum::embed_apply(l, rho);
        tr += branch.weight();
        Matrix dmat = branch.reordered(order).density();
        if (first) {
          image = dmat;
          first = false;
        } else {
          image += dmat;
        }
      }
      if (std::abs(tr - prob) > kTol) {
        return tag + "class probability differs from tr L(rho) by " +
               std::to_string(std::abs(tr - prob));
      }
      if (qnum::frob_dist(image / tr, cls.qfinal.density()) > kTol) {
        return tag + "class state differs from normalized L(rho)";
      }
    }
    if (std::abs(total_prob - 1.0) > kTol) return tag + "probabilities do not sum to 1";
  }
  return "";
}

std::string check_compositionality() {
  protocols::TeleportIds second;
  second.input = 3;
  second.shared_a = 4;
  second.shared_b = 5;
  second.channel = "c2";
  second.recv_x2 = "z2";
  second.recv_x1 = "z1";
  second.agent_a = "B";
  second.agent_b = "A";
  auto seq = check_compose(protocols::teleport(), protocols::teleport(second),
                           ComposeMode::Seq, kTol);
  if (!seq.pass) return "seq(teleport, teleport'): " + seq.witness;

  Network hh = protocols::hadamard_pair();
  Network half_a, half_b;
  half_a.agents = {hh.agents[0]};
  half_b.agents = {hh.agents[1]};
  auto par = check_compose(half_a, half_b, ComposeMode::Par, kTol);
  if (!par.pass) return "par(hadamard halves): " + par.witness;

  std::mt19937_64 rng(60321);
  testutil::NetGen gen(rng);
  testutil::NetGenOptions opt;
  opt.max_agents = 2;
  opt.max_total_qubits = 3;
  for (int trial = 0; trial < 13; ++trial) {
    Network n1 = gen.generate(opt);
    Network n2 = gen.follower(n1, opt);
    auto res = check_compose(n1, n2, ComposeMode::Seq, kTol);
    if (!res.pass) return "random seq pair " + std::to_string(trial) + ": " + res.witness;
  }
  testutil::NetGenOptions opt2 = opt;
  opt2.suffix = "p";
  opt2.first_id = 40;
  for (int trial = 0; trial < 12; ++trial) {
    Network n1 = gen.generate(opt);
    Network n2 = gen.generate(opt2);
    auto res = check_compose(n1, n2, ComposeMode::Par, kTol);
    if (!res.pass) return "random par pair " + std::to_string(trial) + ": " + res.witness;
  }
  return "";
}

std::string check_entanglement_context() {
  auto res = check_context(protocols::teleport(), 1, 20, 7, kTol);
  if (!res.pass) {
    return "teleport context deviation " + std::to_string(res.max_deviation);
  }

  // teleporting both halves of a random entangled pair returns the input
  protocols::TeleportIds second;
  second.input = 11;
  second.shared_a = 12;
  second.shared_b = 13;
  second.channel = "c2";
  second.recv_x2 = "w2";
  second.recv_x1 = "w1";
  second.agent_a = "C";
  second.agent_b = "D";
  Network both =
      net::net_par_compose(protocols::teleport(), protocols::teleport(second));
  std::mt19937_64 rng(808);
  auto psi = testutil::random_pure({1, 11}, rng);
  auto pts = run_from(both, init_with_joint(both, {}, psi), Schedule::canonical(both));
  if (pts.classes.size() != 1) return "double teleport produced several classes";
  auto expected = QRegisterState::pure({3, 13}, psi.amplitudes());
  if (testutil::state_dist(pts.classes[0].first.qfinal, expected) > kTol) {
    return "double teleport changed the joint state";
  }
  return "";
}

std::string check_kraus_completeness() {
  const std::vector<std::pair<std::string, Network>> protocols_list = {
      {"teleport", protocols::teleport()},
      {"direct_channel", protocols::direct_channel()},
      {"hadamard_pair", protocols::hadamard_pair()},
      {"superdense", protocols::superdense()},
      {"bitflip(pi/4)", protocols::bitflip(std::numbers::pi / 4)},
      {"bitflip(pi/2)", protocols::bitflip(std::numbers::pi / 2)},
  };
  for (const auto& [name, n] : protocols_list) {
    Denotation d = denotational(n);
    for (const auto& entry : d.table) {
      const auto total = entry.total();
      if (total.completeness_defect() >= kTol) {
        return name + ": sum of L^dag L differs from the identity";
      }
      std::size_t grouped = 0;
      for (const auto& g : entry.groups) grouped += g.kraus.elements.size();
      if (grouped != total.elements.size()) {
        return name + ": restricted classes do not partition the elements";
      }
    }
  }
  return "";
}

std::string check_validation_fixtures() {
  namespace fs = std::filesystem;
  int bad_fixtures = 0;
  for (const auto& entry : fs::directory_iterator(MCNET_FIXTURES_DIR)) {
    if (entry.path().extension() != ".mq") continue;
    const std::string stem = entry.path().stem().string();
    auto res = run_cli("validate " + entry.path().string());
    if (res.exit_code != 2) {
      return stem + ": expected exit code 2, got " + std::to_string(res.exit_code);
    }
    if (stem.rfind("h", 0) == 0) {
      // designated diagnostic code from the fixture name (h0_, h1_, ...)
      const std::string code = "H" + stem.substr(1, 1);
      if (res.output.find("\"message\": \"" + code) == std::string::npos) {
        return stem + ": missing designated " + code + " diagnostic";
      }
    } else if (res.output.find("\"severity\": \"error\"") == std::string::npos) {
      return stem + ": no error diagnostic reported";
    }
    ++bad_fixtures;
  }
  if (bad_fixtures < 8) {
    return "only " + std::to_string(bad_fixtures) + " violation fixtures found";
  }

  for (const auto& entry : fs::directory_iterator(MCNET_PROTOCOLS_DIR)) {
    if (entry.path().extension() != ".mq") continue;
    auto res = run_cli("validate " + entry.path().string());
    if (res.exit_code != 0) {
      return entry.path().stem().string() + ": library source fails validation";
    }
  }
  for (const char* name :
       {"teleport", "direct_channel", "hadamard_pair", "superdense", "bitflip(0.5)"}) {
    if (!net::validate_network(protocols::library(name)).empty()) {
      return std::string(name) + ": library protocol fails validation";
    }
  }
  return "";
}

}  // namespace

int main() {
  Harness h;

  h.criterion(1, "teleportation correctness", check_teleport_correctness);
  h.criterion(2, "teleport/direct-channel bisimilarity", check_bisimilarity);
  h.criterion(3, "four branches of probability 1/4", check_four_branches);
  h.criterion(4, "bit-flip channel denotation", check_bitflip_channel);

  const auto corpus = make_corpus(50, 20260810);
  h.criterion(5, "schedule independence",
              [&] { return check_schedule_independence(corpus); });
  h.criterion(6, "operational/denotational correspondence",
              [&] { return check_correspondence(corpus); });
  h.criterion(7, "compositionality", check_compositionality);
  h.criterion(8, "entanglement contexts", check_entanglement_context);
  h.criterion(9, "Kraus completeness", check_kraus_completeness);
  h.criterion(10, "validation diagnostics", check_validation_fixtures);

  if (h.failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criteria failed\n", h.failures);
  }
  return h.failures;
}
