#pragma once

// Seeded generator of small valid networks (and composable follower
// networks) for schedule-independence, correspondence and compositionality
// checks. Generated networks declare every bound name as a classical output,
// so operational classes and denotational signal groups are in bijection.

#include <random>
#include <string>
#include <vector>

#include "mcnet/netmodel.hpp"

namespace testutil {

using mcnet::calculus::Command;
using mcnet::calculus::CorrectX;
using mcnet::calculus::CorrectZ;
using mcnet::calculus::Entangle;
using mcnet::calculus::Measure;
using mcnet::calculus::SignalExpr;
using mcnet::net::Agent;
using mcnet::net::ClassicalRecv;
using mcnet::net::ClassicalSend;
using mcnet::net::Network;
using mcnet::net::PatternEvent;
using mcnet::net::Preparation;
using mcnet::net::QuantumRecv;
using mcnet::net::QuantumSend;
using mcnet::qnum::QubitId;

struct NetGenOptions {
  int max_agents = 3;
  int max_total_qubits = 6;
  int max_measurements_per_agent = 2;
  QubitId first_id = 1;
  std::string suffix = "";  // appended to agent/channel/name labels
};

class NetGen {
public:
  explicit NetGen(std::mt19937_64& rng) : rng_(rng) {}

  Network generate(const NetGenOptions& opt) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      Network n = try_generate(opt);
      if (mcnet::net::validate_network(n).empty()) return n;
    }
    throw mcnet::Error("random network generation failed to validate");
  }

  /// A network over the same agents whose sorts start from `first`'s final
  /// sorts and whose classical inputs adopt `first`'s outputs, so that
  /// sequential composition is defined.
  Network follower(const Network& first, const NetGenOptions& opt) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      Network n = try_follower(first, opt);
      if (!mcnet::net::validate_network(n).empty()) continue;
      try {
        Network composed = mcnet::net::net_seq_compose(first, n);
        if (mcnet::net::validate_network(composed).empty()) return n;
      } catch (const mcnet::Error&) {
      }
    }
    throw mcnet::Error("random follower generation failed to validate");
  }

private:
  std::mt19937_64& rng_;
  int channel_counter_ = 0;
  int name_counter_ = 0;

  std::size_t pick(std::size_t n) { return rng_() % n; }

  SignalExpr random_expr(const std::vector<std::string>& pool) {
    SignalExpr e = SignalExpr::bit(int(pick(2)));
    if (pool.empty()) return e;
    const std::size_t picks = pick(std::min<std::size_t>(pool.size(), 2) + 1);
    for (std::size_t i = 0; i < picks; ++i) {
      e = e + SignalExpr::name(pool[pick(pool.size())]);
    }
    return e;
  }

  struct Slot {
    Agent agent;
    std::set<QubitId> sort;               // replayed
    std::vector<std::string> bound;       // names available for expressions
    int meas_left;
  };

  void add_pattern(Slot& s, QubitId& next_id, int& qubit_budget,
                   const NetGenOptions& opt) {
    std::vector<QubitId> avail(s.sort.begin(), s.sort.end());
    std::vector<QubitId> chosen;
    if (!avail.empty()) {
      const std::size_t take = 1 + pick(std::min<std::size_t>(avail.size(), 2));
      for (std::size_t i = 0; i < take; ++i) {
        QubitId q = avail[pick(avail.size())];
        if (std::find(chosen.begin(), chosen.end(), q) == chosen.end()) {
          chosen.push_back(q);
        }
      }
    }
    if (qubit_budget > 0 && (chosen.empty() || pick(2) == 0)) {
      chosen.push_back(next_id++);
      --qubit_budget;
    }
    if (chosen.empty()) return;

    std::vector<QubitId> to_measure;
    for (QubitId q : chosen) {
      if (s.meas_left > 0 && pick(2) == 0) {
        to_measure.push_back(q);
        --s.meas_left;
      }
    }

    static const double angles[] = {0.0, 0.5, -0.25, 1.0, 0.3};
    std::vector<Command> cmds;
    std::vector<std::string> dep_pool = s.bound;
    std::set<QubitId> alive(chosen.begin(), chosen.end());

    const std::size_t n_ent = pick(chosen.size());
    for (std::size_t i = 0; i < n_ent && alive.size() >= 2; ++i) {
      QubitId a = chosen[pick(chosen.size())];
      QubitId b = chosen[pick(chosen.size())];
      if (a != b) cmds.push_back(Entangle{a, b});
    }
    for (QubitId q : to_measure) {
      if (pick(3) == 0 && !alive.empty()) {
        std::vector<QubitId> pool(alive.begin(), alive.end());
        QubitId t = pool[pick(pool.size())];
        if (pick(2)) {
          cmds.push_back(CorrectX{t, random_expr(dep_pool)});
        } else {
          cmds.push_back(CorrectZ{t, random_expr(dep_pool)});
        }
      }
      Measure m;
      m.q = q;
      m.angle = angles[pick(5)] * 3.14159265358979323846;
      m.s_dep = random_expr(dep_pool);
      m.t_dep = random_expr(dep_pool);
      cmds.push_back(m);
      alive.erase(q);
      dep_pool.push_back(mcnet::calculus::signal_name(q));
    }
    if (!alive.empty() && pick(2) == 0) {
      std::vector<QubitId> pool(alive.begin(), alive.end());
      QubitId t = pool[pick(pool.size())];
      if (pick(2)) {
        cmds.push_back(CorrectX{t, random_expr(dep_pool)});
      } else {
        cmds.push_back(CorrectZ{t, random_expr(dep_pool)});
      }
    }
    if (cmds.empty()) return;

    PatternEvent pe{std::move(cmds)};
    // replay the sort and name effects
    for (QubitId q : pe.space()) s.sort.erase(q);
    const auto meas = pe.measured();
    for (QubitId q : pe.space()) {
      if (!meas.contains(q)) s.sort.insert(q);
    }
    for (QubitId q : meas) s.bound.push_back(mcnet::calculus::signal_name(q));
    s.agent.events.push_back(std::move(pe));
  }

  Network try_generate(const NetGenOptions& opt) {
    const std::size_t n_agents = 1 + pick(std::size_t(opt.max_agents));
    static const char* base_names[] = {"A", "B", "C", "D"};
    QubitId next_id = opt.first_id;
    int qubit_budget = opt.max_total_qubits;

    std::vector<Slot> slots(n_agents);
    for (std::size_t i = 0; i < n_agents; ++i) {
      slots[i].agent.name = base_names[i] + opt.suffix;
      slots[i].meas_left = opt.max_measurements_per_agent;
      if (pick(2) == 0) {
        const std::string name = "k" + std::to_string(name_counter_++) + opt.suffix;
        slots[i].agent.cin.insert(name);
        slots[i].bound.push_back(name);
      }
      const std::size_t n_in = pick(3);
      for (std::size_t k = 0; k < n_in && qubit_budget > 0; ++k) {
        slots[i].agent.sort.insert(next_id);
        slots[i].sort.insert(next_id);
        ++next_id;
        --qubit_budget;
      }
    }

    // optional shared preparation pair
    Preparation prep;
    if (qubit_budget >= 2 && pick(2) == 0) {
      QubitId p = next_id++;
      QubitId q = next_id++;
      qubit_budget -= 2;
      slots[pick(n_agents)].agent.sort.insert(p);
      slots[pick(n_agents)].agent.sort.insert(q);
      for (auto& s : slots) {
        for (QubitId id : s.agent.sort) s.sort.insert(id);
      }
      prep = Preparation::entangle({p, q}, {Entangle{p, q}});
    }
    for (auto& s : slots) s.sort = s.agent.sort;

    const std::size_t n_events = 2 + pick(2 * n_agents + 1);
    for (std::size_t ev = 0; ev < n_events; ++ev) {
      Slot& s = slots[pick(n_agents)];
      const int kind = int(pick(3));
      if (kind == 0 || n_agents == 1) {
        add_pattern(s, next_id, qubit_budget, opt);
      } else if (kind == 1 && n_agents >= 2 && !s.bound.empty()) {
        // classical rendezvous on a fresh channel
        std::size_t target = pick(n_agents);
        if (&slots[target] == &s) continue;
        const std::string ch = "ch" + std::to_string(channel_counter_++) + opt.suffix;
        const std::size_t arity = 1 + pick(2);
        std::vector<SignalExpr> values;
        std::vector<std::string> names;
        for (std::size_t k = 0; k < arity; ++k) {
          values.push_back(random_expr(s.bound));
          const std::string rn = "r" + std::to_string(name_counter_++) + opt.suffix;
          names.push_back(rn);
          slots[target].bound.push_back(rn);
        }
        s.agent.events.push_back(ClassicalSend{ch, std::move(values)});
        slots[target].agent.events.push_back(ClassicalRecv{ch, std::move(names)});
      } else if (kind == 2 && n_agents >= 2 && !s.sort.empty()) {
        std::size_t target = pick(n_agents);
        if (&slots[target] == &s) continue;
        std::vector<QubitId> pool(s.sort.begin(), s.sort.end());
        const QubitId q = pool[pick(pool.size())];
        const std::string ch = "qch" + std::to_string(channel_counter_++) + opt.suffix;
        s.agent.events.push_back(QuantumSend{ch, q});
        slots[target].agent.events.push_back(QuantumRecv{ch, q});
        s.sort.erase(q);
        slots[target].sort.insert(q);
      }
    }

    Network n;
    for (auto& s : slots) {
      // observe everything the agent binds: keeps operational classes and
      // denotational groups in bijection
      s.agent.cout.insert(s.bound.begin(), s.bound.end());
      n.agents.push_back(std::move(s.agent));
    }
    n.prep = std::move(prep);
    return n;
  }

  Network try_follower(const Network& first, const NetGenOptions& opt) {
    QubitId next_id = opt.first_id;
    for (const Agent& a : first.agents) {
      for (QubitId q : mcnet::net::used_qubits(a)) next_id = std::max(next_id, q + 1);
    }
    for (QubitId q : first.prep.ids()) next_id = std::max(next_id, q + 1);
    int qubit_budget = 2;

    std::vector<Slot> slots(first.agents.size());
    for (std::size_t i = 0; i < first.agents.size(); ++i) {
      slots[i].agent.name = first.agents[i].name;
      slots[i].meas_left = opt.max_measurements_per_agent;
      slots[i].agent.sort = mcnet::net::output_sort(first.agents[i]);
      slots[i].agent.cin = first.agents[i].cout;  // adopt the outputs
      for (const auto& name : slots[i].agent.cin) slots[i].bound.push_back(name);
      if (qubit_budget > 0 && pick(2) == 0) {
        slots[i].agent.sort.insert(next_id++);
        --qubit_budget;
      }
      slots[i].sort = slots[i].agent.sort;
    }

    const std::size_t n_events = pick(2 * slots.size() + 1);
    for (std::size_t ev = 0; ev < n_events; ++ev) {
      Slot& s = slots[pick(slots.size())];
      const int kind = int(pick(2));
      if (kind == 0) {
        add_pattern(s, next_id, qubit_budget, opt);
      } else if (slots.size() >= 2 && !s.bound.empty()) {
        std::size_t target = pick(slots.size());
        if (&slots[target] == &s) continue;
        const std::string ch = "fch" + std::to_string(channel_counter_++) + opt.suffix;
        std::vector<SignalExpr> values{random_expr(s.bound)};
        const std::string rn = "fr" + std::to_string(name_counter_++) + opt.suffix;
        slots[target].bound.push_back(rn);
        s.agent.events.push_back(ClassicalSend{ch, std::move(values)});
        slots[target].agent.events.push_back(ClassicalRecv{ch, {rn}});
      }
    }

    Network n;
    for (auto& s : slots) {
      for (const auto& name : s.bound) {
        if (!s.agent.cin.contains(name)) s.agent.cout.insert(name);
      }
      n.agents.push_back(std::move(s.agent));
    }
    return n;
  }
};

}  // namespace testutil
