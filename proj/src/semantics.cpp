#include "mcnet/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace mcnet::sem {

using calculus::Pattern;
using calculus::SignalExpr;
using net::Agent;
using net::ClassicalRecv;
using net::ClassicalSend;
using net::Event;
using net::PatternEvent;
using net::QuantumRecv;
using net::QuantumSend;
using qnum::IdList;
using qnum::KrausSet;
using qnum::LinOp;
using qnum::Matrix;

namespace {

IdList sorted_ids(const std::set<QubitId>& s) { return IdList(s.begin(), s.end()); }

Env restrict_env(const Env& env, const std::set<std::string>& names) {
  Env out;
  for (const auto& name : names) {
    auto it = env.find(name);
    if (it != env.end()) out.emplace(name, it->second);
  }
  return out;
}

std::string describe_env(const Env& env) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : env) {
    if (!first) os << ",";
    os << k << "=" << v;
    first = false;
  }
  return os.str();
}

void require_valid(const Network& n) {
  auto violations = net::validate_network(n);
  if (!violations.empty()) {
    throw ValidationFailed(violations.front().code + ": " +
                           violations.front().message);
  }
}

bool class_match(const FinalClass& a, const FinalClass& b) {
  if (a.sorts != b.sorts || a.couts != b.couts) return false;
  if (a.qfinal.ids() != b.qfinal.ids()) return false;
  return qnum::frob_dist(a.qfinal.density(), b.qfinal.density()) <= qnum::kMatTol;
}

FinalClass make_final_class(const Network& n, const Configuration& c) {
  FinalClass cls;
  for (std::size_t i = 0; i < n.agents.size(); ++i) {
    cls.sorts.push_back(c.agents[i].sort);
    cls.couts.push_back(restrict_env(c.agents[i].env, n.agents[i].cout));
  }
  IdList order = c.qstate.ids();
  std::sort(order.begin(), order.end());
  cls.qfinal = c.qstate.reordered(order).to_mixed();
  return cls;
}

void merge_class(std::vector<std::pair<FinalClass, double>>& classes,
                 const FinalClass& cls, double prob) {
  for (auto& [existing, p] : classes) {
    if (class_match(existing, cls)) {
      p += prob;
      return;
    }
  }
  classes.emplace_back(cls, prob);
}

struct StepBranch {
  Configuration config;
  double lambda;
  std::string label;
};

std::vector<StepBranch> step_labeled(const Network& n, const Configuration& c,
                                     const RuleInstance& inst) {
  const auto check_head = [&](int agent) -> const Event& {
    const auto& rt = c.agents[std::size_t(agent)];
    if (rt.next_event >= n.agents[std::size_t(agent)].events.size()) {
      throw NotEnabled("agent " + n.agents[std::size_t(agent)].name +
                       " has no remaining events");
    }
    return n.agents[std::size_t(agent)].events[rt.next_event];
  };

  std::vector<StepBranch> out;
  if (inst.kind == RuleKind::LocalPattern) {
    const Event& e = check_head(inst.agent);
    const auto* pe = std::get_if<PatternEvent>(&e);
    if (!pe) throw NotEnabled("head event is not a pattern");
    const auto& rt = c.agents[std::size_t(inst.agent)];
    const Pattern p = pe->resolve(rt.sort);
    auto branches = calculus::exec_pattern(c.qstate, p, rt.env);
    for (auto& br : branches) {
      Configuration next = c;
      auto& nrt = next.agents[std::size_t(inst.agent)];
      next.qstate = std::move(br.state);
      for (const auto& [name, bit] : br.bindings) nrt.env[name] = bit;
      for (QubitId q : p.inputs) nrt.sort.erase(q);
      for (QubitId q : p.outputs) nrt.sort.insert(q);
      nrt.next_event++;
      out.push_back(StepBranch{std::move(next), br.prob,
                               n.agents[std::size_t(inst.agent)].name + ": pattern " +
                                   (br.bindings.empty() ? std::string("(deterministic)")
                                                        : describe_env(br.bindings))});
    }
    return out;
  }

  if (inst.kind == RuleKind::ClassicalRendezvous) {
    const auto* send = std::get_if<ClassicalSend>(&check_head(inst.agent));
    const auto* recv = std::get_if<ClassicalRecv>(&check_head(inst.peer));
    if (!send || !recv || send->channel != recv->channel ||
        send->values.size() != recv->names.size()) {
      throw NotEnabled("no matching classical rendezvous");
    }
    Configuration next = c;
    auto& sender = next.agents[std::size_t(inst.agent)];
    auto& receiver = next.agents[std::size_t(inst.peer)];
    Env moved;
    for (std::size_t k = 0; k < send->values.size(); ++k) {
      const int v = calculus::eval_signal(send->values[k], sender.env);
      receiver.env[recv->names[k]] = v;
      moved[recv->names[k]] = v;
    }
    sender.next_event++;
    receiver.next_event++;
    out.push_back(StepBranch{std::move(next), 1.0,
                             n.agents[std::size_t(inst.agent)].name + " -> " +
                                 n.agents[std::size_t(inst.peer)].name + " on " +
                                 send->channel + " (" + describe_env(moved) + ")"});
    return out;
  }

  const auto* send = std::get_if<QuantumSend>(&check_head(inst.agent));
  const auto* recv = std::get_if<QuantumRecv>(&check_head(inst.peer));
  if (!send || !recv || send->channel != recv->channel ||
      send->qubit != recv->qubit) {
    throw NotEnabled("no matching quantum rendezvous");
  }
  Configuration next = c;
  auto& sender = next.agents[std::size_t(inst.agent)];
  auto& receiver = next.agents[std::size_t(inst.peer)];
  if (!sender.sort.contains(send->qubit)) {
    throw NotEnabled("sender does not own qubit " + std::to_string(send->qubit));
  }
  sender.sort.erase(send->qubit);
  receiver.sort.insert(recv->qubit);
  sender.next_event++;
  receiver.next_event++;
  out.push_back(StepBranch{std::move(next), 1.0,
                           n.agents[std::size_t(inst.agent)].name + " -> " +
                               n.agents[std::size_t(inst.peer)].name + " qubit " +
                               std::to_string(send->qubit) + " on " + send->channel});
  return out;
}

int instance_rank(const Schedule& s, const RuleInstance& inst) {
  int r = s.rank[std::size_t(inst.agent)];
  if (inst.peer >= 0) r = std::min(r, s.rank[std::size_t(inst.peer)]);
  return r;
}

}  // namespace

bool finished(const Network& n, const Configuration& c) {
  for (std::size_t i = 0; i < n.agents.size(); ++i) {
    if (c.agents[i].next_event < n.agents[i].events.size()) return false;
  }
  return true;
}

std::vector<RuleInstance> enabled(const Network& n, const Configuration& c) {
  std::vector<RuleInstance> out;
  auto head = [&](std::size_t i) -> const Event* {
    if (c.agents[i].next_event >= n.agents[i].events.size()) return nullptr;
    return &n.agents[i].events[c.agents[i].next_event];
  };
  for (std::size_t i = 0; i < n.agents.size(); ++i) {
    const Event* e = head(i);
    if (!e) continue;
    if (std::holds_alternative<PatternEvent>(*e)) {
      out.push_back(RuleInstance{RuleKind::LocalPattern, int(i)});
    } else if (const auto* cs = std::get_if<ClassicalSend>(e)) {
      for (std::size_t j = 0; j < n.agents.size(); ++j) {
        if (j == i) continue;
        const Event* h = head(j);
        const auto* cr = h ? std::get_if<ClassicalRecv>(h) : nullptr;
        if (cr && cr->channel == cs->channel &&
            cr->names.size() == cs->values.size()) {
          out.push_back(RuleInstance{RuleKind::ClassicalRendezvous, int(i), int(j)});
        }
      }
    } else if (const auto* qs = std::get_if<QuantumSend>(e)) {
      for (std::size_t j = 0; j < n.agents.size(); ++j) {
        if (j == i) continue;
        const Event* h = head(j);
        const auto* qr = h ? std::get_if<QuantumRecv>(h) : nullptr;
        if (qr && qr->channel == qs->channel && qr->qubit == qs->qubit) {
          out.push_back(RuleInstance{RuleKind::QuantumRendezvous, int(i), int(j)});
        }
      }
    }
  }
  return out;
}

std::vector<std::pair<Configuration, double>> step(const Network& n,
                                                   const Configuration& c,
                                                   const RuleInstance& inst) {
  std::vector<std::pair<Configuration, double>> out;
  for (auto& br : step_labeled(n, c, inst)) {
    out.emplace_back(std::move(br.config), br.lambda);
  }
  return out;
}

Schedule Schedule::canonical(const Network& n) {
  Schedule s;
  s.rank.resize(n.agents.size());
  for (std::size_t i = 0; i < s.rank.size(); ++i) s.rank[i] = int(i);
  return s;
}

Schedule Schedule::from_names(const Network& n, const std::vector<std::string>& order) {
  if (order.size() != n.agents.size()) {
    throw InputMismatch("schedule must list every agent exactly once");
  }
  Schedule s;
  s.rank.assign(n.agents.size(), -1);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const int idx = n.agent_index(order[pos]);
    if (idx < 0) throw InputMismatch("unknown agent " + order[pos] + " in schedule");
    if (s.rank[std::size_t(idx)] != -1) {
      throw InputMismatch("agent " + order[pos] + " listed twice in schedule");
    }
    s.rank[std::size_t(idx)] = int(pos);
  }
  return s;
}

Configuration init_configuration(const Network& n, const Env& cin,
                                 const std::vector<QRegisterState>& qin) {
  if (qin.size() != n.agents.size()) {
    throw InputMismatch("expected one input state per agent");
  }
  QRegisterState joint = QRegisterState::vacuum();
  for (std::size_t i = 0; i < n.agents.size(); ++i) {
    const auto expected = n.input_ids(i);
    auto got = qin[i].ids();
    auto want = expected;
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    if (got != want) {
      throw InputMismatch("input state of agent " + n.agents[i].name +
                          " does not cover its input qubits");
    }
    joint = qnum::tensor(joint, qin[i]);
  }
  return init_with_joint(n, cin, joint);
}

Configuration init_with_joint(const Network& n, const Env& cin,
                              const QRegisterState& joint) {
  require_valid(n);
  for (const auto& name : n.all_cin()) {
    if (!cin.contains(name)) {
      throw InputMismatch("missing classical input " + name);
    }
  }
  const auto prep_ids = n.prep.ids();
  std::set<QubitId> required;
  for (std::size_t i = 0; i < n.agents.size(); ++i) {
    for (QubitId q : n.input_ids(i)) required.insert(q);
  }
  for (QubitId q : required) {
    if (!joint.has_id(q)) {
      throw InputMismatch("joint input state misses qubit " + std::to_string(q));
    }
  }
  // extra ids ride along; they must not clash with anything the run creates
  std::set<QubitId> used = prep_ids;
  for (const Agent& a : n.agents) {
    auto u = net::used_qubits(a);
    used.insert(u.begin(), u.end());
  }
  for (QubitId q : joint.ids()) {
    if (!required.contains(q) && used.contains(q)) {
      throw InputMismatch("context qubit " + std::to_string(q) +
                          " collides with a network qubit");
    }
  }

  Configuration c{qnum::tensor(n.prep.materialize(), joint), {}};
  for (const Agent& a : n.agents) {
    AgentRuntime rt;
    rt.env = restrict_env(cin, a.cin);
    rt.sort = a.sort;
    c.agents.push_back(std::move(rt));
  }
  return c;
}

PTS run_from(const Network& n, Configuration initial, const Schedule& s,
             const RunOptions& opts) {
  PTS out;
  std::vector<StepRecord> trail;

  std::function<void(const Configuration&, double)> dfs =
      [&](const Configuration& c, double lambda) {
        auto insts = enabled(n, c);
        if (insts.empty()) {
          if (!finished(n, c)) {
            throw Deadlock("no rule enabled but events remain");
          }
          merge_class(out.classes, make_final_class(n, c), lambda);
          if (opts.keep_paths) out.paths.push_back(PathRecord{trail, lambda});
          return;
        }
        const RuleInstance* chosen = &insts.front();
        for (const auto& inst : insts) {
          if (instance_rank(s, inst) < instance_rank(s, *chosen)) chosen = &inst;
        }
        for (auto& br : step_labeled(n, c, *chosen)) {
          trail.push_back(StepRecord{chosen->kind, br.label, br.lambda});
          dfs(br.config, lambda * br.lambda);
          trail.pop_back();
        }
      };

  dfs(initial, 1.0);
  return out;
}

PTS run_schedule(const Network& n, const Env& cin,
                 const std::vector<QRegisterState>& qin, const Schedule& s,
                 const RunOptions& opts) {
  return run_from(n, init_configuration(n, cin, qin), s, opts);
}

PTS operational(const Network& n, const Env& cin,
                const std::vector<QRegisterState>& qin) {
  return run_schedule(n, cin, qin, Schedule::canonical(n));
}

std::vector<Env> enumerate_assignments(const std::set<std::string>& names) {
  const std::vector<std::string> order(names.begin(), names.end());
  std::vector<Env> out;
  const std::size_t count = std::size_t(1) << order.size();
  for (std::size_t m = 0; m < count; ++m) {
    Env a;
    for (std::size_t k = 0; k < order.size(); ++k) {
      a[order[k]] = int(m >> (order.size() - 1 - k)) & 1;
    }
    out.push_back(std::move(a));
  }
  return out;
}

// ---------------------------------------------------------------------------
// schedule independence
// ---------------------------------------------------------------------------

namespace {

using Dist = std::vector<std::pair<FinalClass, double>>;

bool dist_equal(const Dist& a, const Dist& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [ca, pa] : a) {
    bool found = false;
    for (const auto& [cb, pb] : b) {
      if (class_match(ca, cb) && std::abs(pa - pb) <= qnum::kMatTol) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

struct ExploreState {
  std::size_t leaves = 0;
  std::size_t limit;
  bool truncated = false;
};

std::vector<Dist> explore_all(const Network& n, const Configuration& c,
                              ExploreState& st) {
  if (st.truncated) return {};
  auto insts = enabled(n, c);
  if (insts.empty()) {
    if (!finished(n, c)) throw Deadlock("no rule enabled but events remain");
    if (++st.leaves > st.limit) st.truncated = true;
    return {Dist{{make_final_class(n, c), 1.0}}};
  }

  std::vector<Dist> results;
  auto add_result = [&results](Dist d) {
    for (const auto& r : results) {
      if (dist_equal(r, d)) return;
    }
    results.push_back(std::move(d));
  };

  for (const auto& inst : insts) {
    auto branches = step_labeled(n, c, inst);
    std::vector<std::vector<Dist>> subs;
    for (const auto& br : branches) {
      subs.push_back(explore_all(n, br.config, st));
      if (st.truncated) return results;
    }
    // one sub-distribution choice per branch resolves the nondeterminism
    std::vector<std::size_t> pick(branches.size(), 0);
    while (true) {
      Dist combined;
      for (std::size_t b = 0; b < branches.size(); ++b) {
        for (const auto& [cls, p] : subs[b][pick[b]]) {
          merge_class(combined, cls, p * branches[b].lambda);
        }
      }
      add_result(std::move(combined));
      std::size_t k = 0;
      while (k < pick.size() && ++pick[k] == subs[k].size()) {
        pick[k] = 0;
        ++k;
      }
      if (k == pick.size()) break;
    }
  }
  return results;
}

}  // namespace

ScheduleCheck check_schedules(const Network& n, const Env& cin,
                              const std::vector<QRegisterState>& qin,
                              std::size_t limit) {
  Configuration initial = init_configuration(n, cin, qin);
  ExploreState st{0, limit, false};
  ScheduleCheck out{true, 0, false, ""};
  try {
    auto dists = explore_all(n, initial, st);
    out.interleavings = st.leaves;
    out.truncated = st.truncated;
    if (st.truncated) {
      out.witness = "enumeration stopped after " + std::to_string(limit) +
                    " interleavings";
    }
    if (dists.size() > 1) {
      out.pass = false;
      std::ostringstream os;
      os << dists.size() << " distinct transition systems across schedules";
      out.witness = os.str();
      return out;
    }
    // every resolution also has total probability 1
    for (const auto& d : dists) {
      double total = 0.0;
      for (const auto& [cls, p] : d) total += p;
      if (std::abs(total - 1.0) > qnum::kMatTol) {
        out.pass = false;
        out.witness = "probabilities sum to " + std::to_string(total);
        return out;
      }
    }
  } catch (const Deadlock& d) {
    out.pass = false;
    out.witness = std::string("deadlock: ") + d.what();
  }
  return out;
}

// ---------------------------------------------------------------------------
// denotational semantics
// ---------------------------------------------------------------------------

namespace {

struct ReplayStep {
  RuleInstance inst;
  Pattern pattern;                       // LocalPattern only
  std::vector<SignalExpr> send_values;   // ClassicalRendezvous only
  std::vector<std::string> recv_names;
};

struct ControlReplay {
  std::vector<ReplayStep> steps;
  std::vector<std::set<QubitId>> final_sorts;
  std::map<std::string, bool> signal_dep;  // name -> depends on a measurement
};

// Replays the canonical schedule symbolically: event order, resolved
// patterns, sort evolution, and which names carry measurement dependence.
ControlReplay control_replay(const Network& n) {
  ControlReplay out;
  Configuration c{QRegisterState::vacuum(), {}};
  for (const Agent& a : n.agents) {
    AgentRuntime rt;
    rt.sort = a.sort;
    c.agents.push_back(rt);
    for (const auto& name : a.cin) out.signal_dep[name] = false;
  }
  const Schedule s = Schedule::canonical(n);

  while (true) {
    auto insts = enabled(n, c);
    if (insts.empty()) {
      if (!finished(n, c)) throw Deadlock("no rule enabled but events remain");
      break;
    }
    const RuleInstance* chosen = &insts.front();
    for (const auto& inst : insts) {
      if (instance_rank(s, inst) < instance_rank(s, *chosen)) chosen = &inst;
    }
    ReplayStep rs;
    rs.inst = *chosen;
    auto& rt = c.agents[std::size_t(chosen->agent)];
    const Event& e = n.agents[std::size_t(chosen->agent)].events[rt.next_event];
    if (chosen->kind == RuleKind::LocalPattern) {
      const auto& pe = std::get<PatternEvent>(e);
      rs.pattern = pe.resolve(rt.sort);
      for (QubitId q : rs.pattern.inputs) rt.sort.erase(q);
      for (QubitId q : rs.pattern.outputs) rt.sort.insert(q);
      for (QubitId q : calculus::measured_qubits(rs.pattern.commands)) {
        out.signal_dep[calculus::signal_name(q)] = true;
      }
      rt.next_event++;
    } else if (chosen->kind == RuleKind::ClassicalRendezvous) {
      const auto& send = std::get<ClassicalSend>(e);
      auto& prt = c.agents[std::size_t(chosen->peer)];
      const auto& recv = std::get<ClassicalRecv>(
          n.agents[std::size_t(chosen->peer)].events[prt.next_event]);
      rs.send_values = send.values;
      rs.recv_names = recv.names;
      for (std::size_t k = 0; k < recv.names.size(); ++k) {
        bool dep = false;
        for (const auto& t : send.values[k].terms) dep = dep || out.signal_dep[t];
        out.signal_dep[recv.names[k]] = dep;
      }
      rt.next_event++;
      prt.next_event++;
    } else {
      const auto& send = std::get<QuantumSend>(e);
      auto& prt = c.agents[std::size_t(chosen->peer)];
      rt.sort.erase(send.qubit);
      prt.sort.insert(send.qubit);
      rt.next_event++;
      prt.next_event++;
    }
    out.steps.push_back(std::move(rs));
  }
  for (const auto& rt : c.agents) out.final_sorts.push_back(rt.sort);
  return out;
}

struct SymBranch {
  Env signals;
  LinOp acc;
};

}  // namespace

KrausSet DenotationEntry::total() const {
  KrausSet out;
  for (const auto& g : groups) {
    out.elements.insert(out.elements.end(), g.kraus.elements.begin(),
                        g.kraus.elements.end());
  }
  return out;
}

const DenotationEntry& Denotation::entry(const Env& cin) const {
  const Env key = restrict_env(cin, cin_names);
  for (const auto& e : table) {
    if (e.cin == key) return e;
  }
  throw InputMismatch("no table entry for " + describe_env(key));
}

Denotation denotational(const Network& n) {
  require_valid(n);
  Denotation d;
  for (const Agent& a : n.agents) {
    d.agent_names.push_back(a.name);
    d.initial_sorts.push_back(a.sort);
  }
  for (std::size_t i = 0; i < n.agents.size(); ++i) {
    d.inputs_by_agent.push_back(n.input_ids(i));
    d.in_ids.insert(d.in_ids.end(), d.inputs_by_agent.back().begin(),
                    d.inputs_by_agent.back().end());
  }

  const ControlReplay replay = control_replay(n);
  d.final_sorts = replay.final_sorts;
  std::set<QubitId> owned;
  for (const auto& sort : d.final_sorts) {
    d.outputs_by_agent.push_back(sorted_ids(sort));
    owned.insert(sort.begin(), sort.end());
  }

  // preparation isometry components (spectral parts when sigma is mixed)
  const QRegisterState sigma = n.prep.materialize();
  std::vector<LinOp> components;
  {
    const Eigen::Index din = Eigen::Index(1) << d.in_ids.size();
    std::vector<std::pair<double, QRegisterState>> parts;
    if (sigma.num_qubits() == 0) {
      components.push_back(LinOp::identity(d.in_ids));
    } else {
      if (sigma.is_pure()) {
        parts.emplace_back(1.0, sigma);
      } else {
        parts = qnum::spectral(sigma);
      }
      for (const auto& [w, vec] : parts) {
        IdList out_ids = vec.ids();
        out_ids.insert(out_ids.end(), d.in_ids.begin(), d.in_ids.end());
        Matrix m(vec.dim() * din, din);
        m.setZero();
        const auto& amp = vec.amplitudes();
        for (Eigen::Index r = 0; r < vec.dim(); ++r) {
          m.block(r * din, 0, din, din) =
              std::sqrt(w) * amp(r) * Matrix::Identity(din, din);
        }
        components.push_back(LinOp{d.in_ids, std::move(out_ids), std::move(m)});
      }
    }
  }

  // canonical output order: agent-wise sorted sorts, then unowned leftovers
  d.out_ids.clear();
  for (const auto& ids : d.outputs_by_agent) {
    d.out_ids.insert(d.out_ids.end(), ids.begin(), ids.end());
  }
  {
    std::set<QubitId> final_register(components.front().out_ids.begin(),
                                     components.front().out_ids.end());
    // replay sort arithmetic over the register ids
    for (const auto& rs : replay.steps) {
      if (rs.inst.kind != RuleKind::LocalPattern) continue;
      for (QubitId q : rs.pattern.space) final_register.erase(q);
      for (QubitId q : rs.pattern.outputs) final_register.insert(q);
    }
    for (QubitId q : final_register) {
      if (!owned.contains(q)) d.out_ids.push_back(q);
    }
  }

  d.cin_names = n.all_cin();
  for (const auto& name : n.all_cout()) {
    if (replay.signal_dep.at(name)) {
      d.signal_out_names.insert(name);
    } else {
      d.external_out_names.insert(name);
    }
  }

  const std::set<std::string> cout_names = n.all_cout();

  for (const Env& assignment : enumerate_assignments(d.cin_names)) {
    std::vector<SymBranch> branches;
    for (const LinOp& comp : components) {
      branches.push_back(SymBranch{assignment, comp});
    }

    for (const auto& rs : replay.steps) {
      if (rs.inst.kind == RuleKind::LocalPattern) {
        std::vector<SymBranch> next;
        for (const SymBranch& b : branches) {
          for (const auto& [signals, op] :
               calculus::all_branch_operators(rs.pattern, b.signals)) {
            LinOp acc = qnum::compose_on_register(op, b.acc);
            if (acc.matrix.norm() <= qnum::kPruneTol) continue;
            SymBranch nb;
            nb.signals = b.signals;
            for (const auto& [q, bit] : signals) {
              nb.signals[calculus::signal_name(q)] = bit;
            }
            nb.acc = std::move(acc);
            next.push_back(std::move(nb));
          }
        }
        branches = std::move(next);
      } else if (rs.inst.kind == RuleKind::ClassicalRendezvous) {
        for (SymBranch& b : branches) {
          for (std::size_t k = 0; k < rs.recv_names.size(); ++k) {
            b.signals[rs.recv_names[k]] =
                calculus::eval_signal(rs.send_values[k], b.signals);
          }
        }
      }
      // quantum rendezvous: ownership bookkeeping only
    }

    DenotationEntry entry;
    entry.cin = assignment;
    for (SymBranch& b : branches) {
      b.acc = qnum::reorder_out(b.acc, d.out_ids);
      const Env outs = restrict_env(b.signals, cout_names);
      const Env sig = restrict_env(outs, d.signal_out_names);
      DenotationGroup* group = nullptr;
      for (auto& g : entry.groups) {
        if (g.signal_outs == sig) {
          group = &g;
          break;
        }
      }
      if (!group) {
        entry.groups.push_back(DenotationGroup{outs, sig, {}});
        group = &entry.groups.back();
      }
      group->kraus.elements.push_back(std::move(b.acc));
    }
    entry.external_outs =
        entry.groups.empty()
            ? Env{}
            : restrict_env(entry.groups.front().outs, d.external_out_names);
    // sort groups by their signal assignment for deterministic output
    std::sort(entry.groups.begin(), entry.groups.end(),
              [](const DenotationGroup& a, const DenotationGroup& b) {
                return a.signal_outs < b.signal_outs;
              });
    d.table.push_back(std::move(entry));
  }
  return d;
}

// ---------------------------------------------------------------------------
// equivalence
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> sorted_names(const std::set<std::string>& s) {
  return std::vector<std::string>(s.begin(), s.end());
}

}  // namespace

EquivResult equivalent(const Network& n1, const Network& n2, double tol) {
  EquivResult res{true, "", 0.0};
  auto fail = [&res](const std::string& why) {
    res.equivalent = false;
    if (res.witness.empty()) res.witness = why;
  };

  const Denotation d1 = denotational(n1);
  const Denotation d2 = denotational(n2);

  if (d1.agent_names.size() != d2.agent_names.size()) {
    fail("agent counts differ: " + std::to_string(d1.agent_names.size()) + " vs " +
         std::to_string(d2.agent_names.size()));
    return res;
  }

  // positional correspondence of types and classical interfaces
  std::map<std::string, std::string> rename;  // n1 classical name -> n2 name
  for (std::size_t i = 0; i < d1.agent_names.size(); ++i) {
    if (d1.inputs_by_agent[i].size() != d2.inputs_by_agent[i].size()) {
      fail("agent position " + std::to_string(i) +
           ": quantum input sizes differ (type mismatch)");
      return res;
    }
    if (d1.outputs_by_agent[i].size() != d2.outputs_by_agent[i].size()) {
      fail("agent position " + std::to_string(i) +
           ": final sort sizes differ (type mismatch)");
      return res;
    }
    const auto cin1 = sorted_names(n1.agents[i].cin);
    const auto cin2 = sorted_names(n2.agents[i].cin);
    if (cin1.size() != cin2.size()) {
      fail("agent position " + std::to_string(i) + ": classical input sizes differ");
      return res;
    }
    for (std::size_t k = 0; k < cin1.size(); ++k) rename[cin1[k]] = cin2[k];
    const auto cout1 = sorted_names(n1.agents[i].cout);
    const auto cout2 = sorted_names(n2.agents[i].cout);
    if (cout1.size() != cout2.size()) {
      fail("agent position " + std::to_string(i) +
           ": classical output sets differ in size");
      return res;
    }
    for (std::size_t k = 0; k < cout1.size(); ++k) rename[cout1[k]] = cout2[k];
  }

  // the signal/external split must agree under the renaming
  for (const auto& name : d1.signal_out_names) {
    if (!d2.signal_out_names.contains(rename.at(name))) {
      fail("output " + name + " is signal-dependent in one network only");
      return res;
    }
  }
  for (const auto& name : d1.external_out_names) {
    if (!d2.external_out_names.contains(rename.at(name))) {
      fail("output " + name + " is external in one network only");
      return res;
    }
  }

  auto translate = [&rename](const Env& env) {
    Env out;
    for (const auto& [k, v] : env) out[rename.at(k)] = v;
    return out;
  };

  for (const auto& e1 : d1.table) {
    const DenotationEntry& e2 = d2.entry(translate(e1.cin));
    const std::string input_tag =
        e1.cin.empty() ? "(no classical input)" : describe_env(e1.cin);

    if (translate(e1.external_outs) != e2.external_outs) {
      fail("input " + input_tag + ": external outputs differ");
      return res;
    }
    if (e1.groups.size() != e2.groups.size()) {
      fail("input " + input_tag + ": " + std::to_string(e1.groups.size()) +
           " output classes vs " + std::to_string(e2.groups.size()));
      return res;
    }
    for (const auto& g1 : e1.groups) {
      const Env want = translate(g1.signal_outs);
      const DenotationGroup* g2 = nullptr;
      for (const auto& g : e2.groups) {
        if (g.signal_outs == want) {
          g2 = &g;
          break;
        }
      }
      if (!g2) {
        fail("input " + input_tag + ": no class with signal output " +
             describe_env(want));
        return res;
      }
      const double dist = qnum::frob_dist(qnum::choi(g1.kraus), qnum::choi(g2->kraus));
      res.max_choi_dist = std::max(res.max_choi_dist, dist);
      if (dist > tol) {
        fail("input " + input_tag + ", class " + describe_env(g1.signal_outs) +
             ": Choi distance " + std::to_string(dist));
        return res;
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// entanglement contexts
// ---------------------------------------------------------------------------

ContextCheck check_context(const Network& n, int extra_qubits, int trials,
                           unsigned seed, double tol) {
  require_valid(n);
  const Denotation d = denotational(n);

  Env zero_cin;
  for (const auto& name : d.cin_names) zero_cin[name] = 0;
  const DenotationEntry& entry = d.entry(zero_cin);

  // fresh ids for the untouched context system C
  QubitId max_id = 0;
  for (const Agent& a : n.agents) {
    for (QubitId q : net::used_qubits(a)) max_id = std::max(max_id, q);
  }
  for (QubitId q : n.prep.ids()) max_id = std::max(max_id, q);
  IdList context_ids;
  for (int k = 0; k < extra_qubits; ++k) context_ids.push_back(max_id + 1 + k);

  IdList joint_ids = d.in_ids;
  joint_ids.insert(joint_ids.end(), context_ids.begin(), context_ids.end());

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;

  ContextCheck out{true, 0.0, trials, extra_qubits, seed};
  for (int trial = 0; trial < trials; ++trial) {
    qnum::Vector amp(Eigen::Index(1) << joint_ids.size());
    for (Eigen::Index i = 0; i < amp.size(); ++i) {
      amp(i) = std::complex<double>(g(rng), g(rng));
    }
    amp /= amp.norm();
    const QRegisterState psi = QRegisterState::pure(joint_ids, amp);

    // (i) full simulation with C riding along
    const PTS pts =
        run_from(n, init_with_joint(n, zero_cin, psi), Schedule::canonical(n));
    IdList order;
    Matrix rho_sim;
    bool first = true;
    for (const auto& [cls, p] : pts.classes) {
      if (first) {
        order = cls.qfinal.ids();
        rho_sim = Matrix::Zero(cls.qfinal.dim(), cls.qfinal.dim());
        first = false;
      }
      rho_sim += p * cls.qfinal.reordered(order).density();
    }

    // (ii) Kraus formula with identity on C
    Matrix rho_formula = Matrix::Zero(rho_sim.rows(), rho_sim.cols());
    for (const LinOp& k : entry.total().elements) {
      rho_formula += qnum::embed_apply(k, psi).reordered(order).density();
    }

    out.max_deviation = std::max(out.max_deviation,
                                 qnum::frob_dist(rho_sim, rho_formula));
  }
  out.pass = out.max_deviation < tol;
  return out;
}

// ---------------------------------------------------------------------------
// compositionality
// ---------------------------------------------------------------------------

ComposeCheck check_compose(const Network& n1, const Network& n2, ComposeMode mode,
                           double tol) {
  const Network composed = mode == ComposeMode::Seq ? net::net_seq_compose(n1, n2)
                                                    : net::net_par_compose(n1, n2);
  const Denotation dc = denotational(composed);
  const Denotation d1 = denotational(n1);
  const Denotation d2 = denotational(n2);

  ComposeCheck out{true, 0.0, ""};
  auto fail = [&out](const std::string& why) {
    out.pass = false;
    if (out.witness.empty()) out.witness = why;
  };

  for (const auto& ec : dc.table) {
    // formula-side groups: signal assignment -> elements
    std::map<Env, KrausSet> formula;
    Env expect_external;

    auto add_pair = [&](const DenotationGroup& g1, const DenotationGroup& g2,
                        const LinOp& element) {
      Env full = g1.outs;
      for (const auto& [k, v] : g2.outs) full[k] = v;
      const Env key = restrict_env(full, dc.signal_out_names);
      const Env ext = restrict_env(full, dc.external_out_names);
      if (expect_external.empty()) expect_external = ext;
      formula[key].elements.push_back(element);
    };

    if (mode == ComposeMode::Seq) {
      const DenotationEntry& e1 = d1.entry(ec.cin);
      for (const auto& g1 : e1.groups) {
        Env cin2;
        for (const auto& name : d2.cin_names) {
          auto in_a = ec.cin.find(name);
          if (in_a != ec.cin.end()) {
            cin2[name] = in_a->second;
          } else {
            cin2[name] = g1.outs.at(name);  // fed from the first network
          }
        }
        const DenotationEntry& e2 = d2.entry(cin2);
        for (const auto& g2 : e2.groups) {
          for (const LinOp& l1 : g1.kraus.elements) {
            for (const LinOp& l2 : g2.kraus.elements) {
              LinOp acc = qnum::compose_on_register(l1, LinOp::identity(dc.in_ids));
              acc = qnum::compose_on_register(l2, acc);
              add_pair(g1, g2, qnum::reorder_out(acc, dc.out_ids));
            }
          }
        }
      }
    } else {
      const DenotationEntry& e1 = d1.entry(ec.cin);
      const DenotationEntry& e2 = d2.entry(ec.cin);
      for (const auto& g1 : e1.groups) {
        for (const auto& g2 : e2.groups) {
          for (const LinOp& l1 : g1.kraus.elements) {
            for (const LinOp& l2 : g2.kraus.elements) {
              IdList in = l1.in_ids;
              in.insert(in.end(), l2.in_ids.begin(), l2.in_ids.end());
              IdList outids = l1.out_ids;
              outids.insert(outids.end(), l2.out_ids.begin(), l2.out_ids.end());
              Matrix m(l1.matrix.rows() * l2.matrix.rows(),
                       l1.matrix.cols() * l2.matrix.cols());
              for (Eigen::Index i = 0; i < l1.matrix.rows(); ++i) {
                for (Eigen::Index j = 0; j < l1.matrix.cols(); ++j) {
                  m.block(i * l2.matrix.rows(), j * l2.matrix.cols(),
                          l2.matrix.rows(), l2.matrix.cols()) =
                      l1.matrix(i, j) * l2.matrix;
                }
              }
              LinOp joint{std::move(in), std::move(outids), std::move(m)};
              joint = qnum::reorder_in(joint, dc.in_ids);
              add_pair(g1, g2, qnum::reorder_out(joint, dc.out_ids));
            }
          }
        }
      }
    }

    const std::string input_tag =
        ec.cin.empty() ? "(no classical input)" : describe_env(ec.cin);
    if (expect_external != ec.external_outs) {
      fail("input " + input_tag + ": external outputs differ");
      return out;
    }
    if (formula.size() != ec.groups.size()) {
      fail("input " + input_tag + ": " + std::to_string(ec.groups.size()) +
           " classes in the composed network, " + std::to_string(formula.size()) +
           " from the composed denotations");
      return out;
    }
    for (const auto& g : ec.groups) {
      auto it = formula.find(g.signal_outs);
      if (it == formula.end()) {
        fail("input " + input_tag + ": class " + describe_env(g.signal_outs) +
             " missing from the composed denotations");
        return out;
      }
      const double dist = qnum::frob_dist(qnum::choi(g.kraus), qnum::choi(it->second));
      out.max_choi_dist = std::max(out.max_choi_dist, dist);
      if (dist > tol) {
        fail("input " + input_tag + ", class " + describe_env(g.signal_outs) +
             ": Choi distance " + std::to_string(dist));
        return out;
      }
    }
  }
  return out;
}

}  // namespace mcnet::sem
