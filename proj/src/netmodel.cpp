#include "mcnet/netmodel.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace mcnet::net {

using calculus::Command;
using calculus::Pattern;
using qnum::QRegisterState;

std::set<QubitId> PatternEvent::space() const {
  std::set<QubitId> out;
  for (const Command& c : commands) {
    auto qs = calculus::command_qubits(c);
    out.insert(qs.begin(), qs.end());
  }
  return out;
}

std::set<QubitId> PatternEvent::measured() const {
  return calculus::measured_qubits(commands);
}

Pattern PatternEvent::resolve(const std::set<QubitId>& sort) const {
  Pattern p;
  p.space = space();
  for (QubitId q : p.space) {
    if (sort.contains(q)) p.inputs.insert(q);
  }
  const auto meas = measured();
  for (QubitId q : p.space) {
    if (!meas.contains(q)) p.outputs.insert(q);
  }
  p.commands = commands;
  return p;
}

Preparation Preparation::entangle(std::set<QubitId> space,
                                  std::vector<calculus::Entangle> pairs) {
  Preparation p;
  p.kind_ = Kind::Pattern;
  p.space_ = std::move(space);
  p.pairs_ = std::move(pairs);
  return p;
}

Preparation Preparation::state(QRegisterState s) {
  Preparation p;
  p.kind_ = Kind::State;
  p.state_ = std::move(s);
  return p;
}

std::set<QubitId> Preparation::ids() const {
  switch (kind_) {
    case Kind::None:
      return {};
    case Kind::Pattern:
      return space_;
    case Kind::State:
      return std::set<QubitId>(state_->ids().begin(), state_->ids().end());
  }
  return {};
}

QRegisterState Preparation::materialize() const {
  switch (kind_) {
    case Kind::None:
      return QRegisterState::vacuum();
    case Kind::State:
      return *state_;
    case Kind::Pattern: {
      Pattern p;
      p.space = space_;
      p.outputs = space_;
      for (const auto& e : pairs_) p.commands.push_back(e);
      auto branches = calculus::exec_pattern(QRegisterState::vacuum(), p, {});
      return branches.front().state;
    }
  }
  return QRegisterState::vacuum();
}

const QRegisterState& Preparation::explicit_state() const {
  if (!state_) throw Error("preparation has no explicit state");
  return *state_;
}

bool Preparation::operator==(const Preparation& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == Kind::Pattern) {
    return space_ == other.space_ &&
           std::equal(pairs_.begin(), pairs_.end(), other.pairs_.begin(),
                      other.pairs_.end(),
                      [](const auto& a, const auto& b) { return a == b; });
  }
  if (kind_ == Kind::State) {
    if (state_->ids() != other.state_->ids()) return false;
    return (state_->density() - other.state_->density()).norm() < qnum::kMatTol;
  }
  return true;
}

const Agent* Network::find_agent(const std::string& name) const {
  for (const Agent& a : agents) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

int Network::agent_index(const std::string& name) const {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].name == name) return int(i);
  }
  return -1;
}

std::vector<QubitId> Network::input_ids(std::size_t i) const {
  const auto shared = prep.ids();
  std::vector<QubitId> out;
  for (QubitId q : agents[i].sort) {
    if (!shared.contains(q)) out.push_back(q);
  }
  return out;
}

std::set<std::string> Network::all_cin() const {
  std::set<std::string> out;
  for (const Agent& a : agents) out.insert(a.cin.begin(), a.cin.end());
  return out;
}

std::set<std::string> Network::all_cout() const {
  std::set<std::string> out;
  for (const Agent& a : agents) out.insert(a.cout.begin(), a.cout.end());
  return out;
}

std::set<QubitId> used_qubits(const Agent& a) {
  std::set<QubitId> out = a.sort;
  for (const Event& e : a.events) {
    if (const auto* p = std::get_if<PatternEvent>(&e)) {
      auto s = p->space();
      out.insert(s.begin(), s.end());
    } else if (const auto* qs = std::get_if<QuantumSend>(&e)) {
      out.insert(qs->qubit);
    } else if (const auto* qr = std::get_if<QuantumRecv>(&e)) {
      out.insert(qr->qubit);
    }
  }
  return out;
}

std::set<std::string> bound_names(const Agent& a) {
  std::set<std::string> out = a.cin;
  for (const Event& e : a.events) {
    if (const auto* p = std::get_if<PatternEvent>(&e)) {
      for (QubitId q : p->measured()) out.insert(calculus::signal_name(q));
    } else if (const auto* r = std::get_if<ClassicalRecv>(&e)) {
      out.insert(r->names.begin(), r->names.end());
    }
  }
  return out;
}

namespace {

// Sort update for one event; `violate` reports H0 breaks instead of throwing.
template <typename Report>
void replay_event(std::set<QubitId>& sort, const Event& e, Report&& violate) {
  if (const auto* p = std::get_if<PatternEvent>(&e)) {
    const auto space = p->space();
    const auto meas = p->measured();
    for (QubitId q : space) {
      if (sort.contains(q)) sort.erase(q);
    }
    for (QubitId q : space) {
      if (!meas.contains(q)) sort.insert(q);
    }
  } else if (const auto* qs = std::get_if<QuantumSend>(&e)) {
    if (!sort.contains(qs->qubit)) {
      violate("quantum send of qubit " + std::to_string(qs->qubit) +
              " outside the sort");
    } else {
      sort.erase(qs->qubit);
    }
  } else if (const auto* qr = std::get_if<QuantumRecv>(&e)) {
    if (sort.contains(qr->qubit)) {
      violate("quantum receive of qubit " + std::to_string(qr->qubit) +
              " already in the sort");
    } else {
      sort.insert(qr->qubit);
    }
  }
}

}  // namespace

std::set<QubitId> output_sort(const Agent& a) {
  std::set<QubitId> sort = a.sort;
  for (const Event& e : a.events) {
    replay_event(sort, e, [&](const std::string& msg) {
      throw UnknownQubit(a.name + ": " + msg);
    });
  }
  return sort;
}

std::vector<Violation> validate_network(const Network& n) {
  std::vector<Violation> out;
  auto report = [&out](std::string code, std::string msg, int agent = -1,
                       int event = -1) {
    out.push_back(Violation{std::move(code), std::move(msg), agent, event});
  };

  // distinct agent names
  for (std::size_t i = 0; i < n.agents.size(); ++i) {
    for (std::size_t j = i + 1; j < n.agents.size(); ++j) {
      if (n.agents[i].name == n.agents[j].name) {
        report("H3", "duplicate agent name " + n.agents[i].name, int(j));
      }
    }
  }

  // preparation structure
  const auto prep_ids = n.prep.ids();
  if (n.prep.is_pattern()) {
    for (const auto& e : n.prep.pattern_pairs()) {
      if (e.a == e.b) {
        report("SIGMA", "preparation entangles qubit " + std::to_string(e.a) +
                            " with itself");
      }
      if (!prep_ids.contains(e.a) || !prep_ids.contains(e.b)) {
        report("SIGMA", "preparation entangle outside its qubit set");
      }
    }
  }

  // qubit introduction ledger: preparation ids, initial sorts, pattern-fresh
  // qubits; every id enters exactly once (H3)
  std::map<QubitId, std::string> intro;
  for (QubitId q : prep_ids) intro[q] = "preparation";
  for (std::size_t i = 0; i < n.agents.size(); ++i) {
    const Agent& a = n.agents[i];
    for (QubitId q : a.sort) {
      if (prep_ids.contains(q)) continue;  // shared qubit, introduced by sigma
      auto [it, fresh] = intro.emplace(q, "sort of " + a.name);
      if (!fresh) {
        report("H3", "qubit " + std::to_string(q) + " already introduced by " +
                         it->second, int(i));
      }
    }
  }

  // name introduction ledger (H3)
  std::map<std::string, std::string> name_intro;
  auto intro_name = [&](const std::string& name, const std::string& where,
                        int agent, int event) {
    auto [it, fresh] = name_intro.emplace(name, where);
    if (!fresh) {
      report("H3", "name " + name + " already bound by " + it->second, agent, event);
    }
  };
  for (std::size_t i = 0; i < n.agents.size(); ++i) {
    for (const auto& name : n.agents[i].cin) {
      intro_name(name, "input of " + n.agents[i].name, int(i), -1);
    }
  }

  // per-agent replay: H0 sorts, H1 bound names, fresh-qubit introductions
  for (std::size_t i = 0; i < n.agents.size(); ++i) {
    const Agent& a = n.agents[i];
    std::set<QubitId> sort = a.sort;
    std::set<std::string> bound = a.cin;

    for (std::size_t ev = 0; ev < a.events.size(); ++ev) {
      const Event& e = a.events[ev];
      if (const auto* p = std::get_if<PatternEvent>(&e)) {
        const Pattern resolved = p->resolve(sort);
        for (const auto& pv : calculus::validate_pattern(resolved)) {
          report("H0", a.name + ": " + pv.message, int(i), int(ev));
        }
        // fresh computation qubits must be globally new
        for (QubitId q : resolved.space) {
          if (resolved.inputs.contains(q)) continue;
          auto [it, fresh] =
              intro.emplace(q, "pattern of " + a.name);
          if (!fresh) {
            report("H3", "qubit " + std::to_string(q) + " already introduced by " +
                             it->second, int(i), int(ev));
          }
        }
        // dependencies resolve against bound names plus earlier in-pattern
        // signals (H1); signal bindings join the ledgers
        std::set<std::string> local = bound;
        for (std::size_t ci = 0; ci < resolved.commands.size(); ++ci) {
          const Command& c = resolved.commands[ci];
          auto check_expr = [&](const SignalExpr& expr) {
            for (const auto& t : expr.terms) {
              if (!local.contains(t)) {
                report("H1", a.name + ": name " + t + " used before binding",
                       int(i), int(ev));
              }
            }
          };
          if (const auto* m = std::get_if<calculus::Measure>(&c)) {
            check_expr(m->s_dep);
            check_expr(m->t_dep);
            local.insert(calculus::signal_name(m->q));
          } else if (const auto* x = std::get_if<calculus::CorrectX>(&c)) {
            check_expr(x->dep);
          } else if (const auto* z = std::get_if<calculus::CorrectZ>(&c)) {
            check_expr(z->dep);
          }
        }
        for (QubitId q : p->measured()) {
          const std::string sig = calculus::signal_name(q);
          intro_name(sig, "measurement by " + a.name, int(i), int(ev));
          bound.insert(sig);
        }
      } else if (const auto* cs = std::get_if<ClassicalSend>(&e)) {
        if (cs->values.empty()) report("H2", "empty classical send", int(i), int(ev));
        for (const auto& expr : cs->values) {
          for (const auto& t : expr.terms) {
            if (!bound.contains(t)) {
              report("H1", a.name + ": sends unbound name " + t, int(i), int(ev));
            }
          }
        }
      } else if (const auto* cr = std::get_if<ClassicalRecv>(&e)) {
        if (cr->names.empty()) report("H2", "empty classical receive", int(i), int(ev));
        for (const auto& name : cr->names) {
          intro_name(name, "receive by " + a.name, int(i), int(ev));
          bound.insert(name);
        }
      }
      replay_event(sort, e, [&](const std::string& msg) {
        report("H0", a.name + ": " + msg, int(i), int(ev));
      });
    }

    for (const auto& name : a.cout) {
      if (!bound.contains(name)) {
        report("H1", a.name + ": output name " + name + " is never bound", int(i));
      }
    }
  }

  // sorts pairwise disjoint (H3)
  for (std::size_t i = 0; i < n.agents.size(); ++i) {
    for (std::size_t j = i + 1; j < n.agents.size(); ++j) {
      for (QubitId q : n.agents[i].sort) {
        if (n.agents[j].sort.contains(q)) {
          report("H3", "agents " + n.agents[i].name + " and " + n.agents[j].name +
                           " both own qubit " + std::to_string(q), int(j));
        }
      }
    }
  }

  // H2: static rendezvous pairing per channel
  struct CommEvent {
    int agent;
    int event;
    bool quantum;
    bool send;
    std::size_t arity;  // classical payload size
    QubitId qubit;      // quantum payload
  };
  std::map<std::string, std::vector<CommEvent>> channels;
  for (std::size_t i = 0; i < n.agents.size(); ++i) {
    const Agent& a = n.agents[i];
    for (std::size_t ev = 0; ev < a.events.size(); ++ev) {
      const Event& e = a.events[ev];
      if (const auto* cs = std::get_if<ClassicalSend>(&e)) {
        channels[cs->channel].push_back(
            {int(i), int(ev), false, true, cs->values.size(), -1});
      } else if (const auto* cr = std::get_if<ClassicalRecv>(&e)) {
        channels[cr->channel].push_back(
            {int(i), int(ev), false, false, cr->names.size(), -1});
      } else if (const auto* qs = std::get_if<QuantumSend>(&e)) {
        channels[qs->channel].push_back({int(i), int(ev), true, true, 0, qs->qubit});
      } else if (const auto* qr = std::get_if<QuantumRecv>(&e)) {
        channels[qr->channel].push_back({int(i), int(ev), true, false, 0, qr->qubit});
      }
    }
  }

  // rendezvous groups for the precedence graph: event -> group id
  std::map<std::pair<int, int>, int> group;
  int next_group = 0;

  for (auto& [name, evs] : channels) {
    std::vector<CommEvent> sends, recvs;
    std::set<int> senders, receivers;
    bool quantum = evs.front().quantum;
    bool mixed = false;
    for (const CommEvent& ce : evs) {
      if (ce.quantum != quantum) mixed = true;
      (ce.send ? sends : recvs).push_back(ce);
      (ce.send ? senders : receivers).insert(ce.agent);
    }
    if (mixed) {
      report("H2", "channel " + name + " mixes classical and quantum events");
      continue;
    }
    if (senders.size() > 1 || receivers.size() > 1) {
      report("H2", "channel " + name +
                       " has several senders or receivers; pairing is ambiguous");
      continue;
    }
    if (!senders.empty() && !receivers.empty() &&
        *senders.begin() == *receivers.begin()) {
      report("H2", "channel " + name + " connects agent " +
                       n.agents[*senders.begin()].name + " to itself");
      continue;
    }
    if (sends.size() != recvs.size()) {
      report("H2", "channel " + name + " has " + std::to_string(sends.size()) +
                       " sends but " + std::to_string(recvs.size()) + " receives");
      continue;
    }
    for (std::size_t k = 0; k < sends.size(); ++k) {
      if (!quantum && sends[k].arity != recvs[k].arity) {
        report("H2", "channel " + name + ": send of " +
                         std::to_string(sends[k].arity) + " values paired with receive of " +
                         std::to_string(recvs[k].arity),
               recvs[k].agent, recvs[k].event);
      }
      if (quantum && sends[k].qubit != recvs[k].qubit) {
        report("H2", "channel " + name + ": send of qubit " +
                         std::to_string(sends[k].qubit) + " paired with receive of qubit " +
                         std::to_string(recvs[k].qubit),
               recvs[k].agent, recvs[k].event);
      }
      const int g = next_group++;
      group[{sends[k].agent, sends[k].event}] = g;
      group[{recvs[k].agent, recvs[k].event}] = g;
    }
  }

  // a consistent global order must exist: rendezvous-merged precedence graph
  // over per-agent event sequences is acyclic
  {
    std::map<std::pair<int, int>, int> node;  // event -> merged node
    int next_node = next_group;
    auto node_of = [&](int agent, int event) {
      auto it = group.find({agent, event});
      if (it != group.end()) return it->second;
      auto [nit, fresh] = node.emplace(std::make_pair(agent, event), next_node);
      if (fresh) ++next_node;
      return nit->second;
    };
    std::map<int, std::set<int>> edges;
    std::set<int> nodes;
    for (std::size_t i = 0; i < n.agents.size(); ++i) {
      const auto& evs = n.agents[i].events;
      for (std::size_t ev = 0; ev < evs.size(); ++ev) {
        const int cur = node_of(int(i), int(ev));
        nodes.insert(cur);
        if (ev + 1 < evs.size()) edges[cur].insert(node_of(int(i), int(ev + 1)));
      }
    }
    std::map<int, int> color;  // 0 unseen, 1 in progress, 2 done
    bool cyclic = false;
    auto dfs = [&](auto&& self, int v) -> void {
      color[v] = 1;
      for (int w : edges[v]) {
        if (color[w] == 1) cyclic = true;
        else if (color[w] == 0 && !cyclic) self(self, w);
      }
      color[v] = 2;
    };
    for (int v : nodes) {
      if (color[v] == 0 && !cyclic) dfs(dfs, v);
    }
    if (cyclic) {
      report("H2", "rendezvous ordering is cyclic; no schedule can complete");
    }
  }

  return out;
}

Agent agent_compose(const Agent& first, const Agent& second) {
  if (first.name != second.name) {
    throw NameMismatch("cannot compose agents " + first.name + " and " + second.name);
  }
  const std::set<QubitId> out1 = output_sort(first);
  const std::set<QubitId> used1 = used_qubits(first);

  Agent out;
  out.name = first.name;
  out.cin = first.cin;
  for (const auto& name : second.cin) {
    if (!first.cout.contains(name)) out.cin.insert(name);
  }
  out.cout = first.cout;
  out.cout.insert(second.cout.begin(), second.cout.end());
  out.sort = first.sort;
  for (QubitId q : second.sort) {
    if (out1.contains(q)) continue;
    if (used1.contains(q)) {
      throw SortMismatch("qubit " + std::to_string(q) +
                         " of the second program was already used by the first");
    }
    out.sort.insert(q);
  }
  out.events = first.events;
  out.events.insert(out.events.end(), second.events.begin(), second.events.end());
  return out;
}

namespace {

Preparation combine_preps(const Preparation& a, const Preparation& b) {
  if (a.is_none()) return b;
  if (b.is_none()) return a;
  for (QubitId q : b.ids()) {
    if (a.ids().contains(q)) {
      throw OverlappingIds("preparations share qubit " + std::to_string(q));
    }
  }
  if (a.is_pattern() && b.is_pattern()) {
    std::set<QubitId> space = a.pattern_space();
    space.insert(b.pattern_space().begin(), b.pattern_space().end());
    auto pairs = a.pattern_pairs();
    pairs.insert(pairs.end(), b.pattern_pairs().begin(), b.pattern_pairs().end());
    return Preparation::entangle(std::move(space), std::move(pairs));
  }
  return Preparation::state(qnum::tensor(a.materialize(), b.materialize()));
}

void require_unique_names(const Network& n) {
  std::set<std::string> seen;
  for (const Agent& a : n.agents) {
    if (!seen.insert(a.name).second) {
      throw AgentSetMismatch("duplicate agent name " + a.name);
    }
  }
}

}  // namespace

Network net_seq_compose(const Network& n1, const Network& n2) {
  require_unique_names(n1);
  require_unique_names(n2);

  Network out;
  out.prep = combine_preps(n1.prep, n2.prep);

  auto null_agent = [](const std::string& name) {
    Agent a;
    a.name = name;
    return a;
  };

  for (const Agent& a1 : n1.agents) {
    const Agent* a2 = n2.find_agent(a1.name);
    out.agents.push_back(agent_compose(a1, a2 ? *a2 : null_agent(a1.name)));
  }
  for (const Agent& a2 : n2.agents) {
    if (!n1.find_agent(a2.name)) {
      out.agents.push_back(agent_compose(null_agent(a2.name), a2));
    }
  }
  return out;
}

Network net_par_compose(const Network& n1, const Network& n2) {
  for (const Agent& a : n2.agents) {
    if (n1.find_agent(a.name)) {
      throw NameCollision("both networks contain agent " + a.name);
    }
  }
  std::set<QubitId> ids1 = n1.prep.ids();
  std::set<std::string> names1;
  for (const Agent& a : n1.agents) {
    auto u = used_qubits(a);
    ids1.insert(u.begin(), u.end());
    auto b = bound_names(a);
    names1.insert(b.begin(), b.end());
  }
  for (const Agent& a : n2.agents) {
    for (QubitId q : used_qubits(a)) {
      if (ids1.contains(q)) {
        throw OverlappingIds("networks share qubit " + std::to_string(q));
      }
    }
    for (const auto& name : bound_names(a)) {
      if (names1.contains(name)) {
        throw NameCollision("networks share classical name " + name);
      }
    }
  }
  for (QubitId q : n2.prep.ids()) {
    if (ids1.contains(q)) {
      throw OverlappingIds("networks share qubit " + std::to_string(q));
    }
  }

  Network out;
  out.agents = n1.agents;
  out.agents.insert(out.agents.end(), n2.agents.begin(), n2.agents.end());
  out.prep = combine_preps(n1.prep, n2.prep);
  return out;
}

}  // namespace mcnet::net
