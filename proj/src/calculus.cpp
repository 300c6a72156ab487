#include "mcnet/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mcnet::calculus {

using qnum::Complex;
using qnum::IdList;
using qnum::LinOp;
using qnum::Matrix;
using qnum::QRegisterState;

std::string signal_name(QubitId q) { return "s" + std::to_string(q); }

SignalExpr SignalExpr::operator+(const SignalExpr& other) const {
  SignalExpr out;
  out.constant = (constant + other.constant) & 1;
  out.terms = terms;
  for (const auto& t : other.terms) {
    auto it = out.terms.find(t);
    if (it == out.terms.end()) {
      out.terms.insert(t);
    } else {
      out.terms.erase(it);  // t + t = 0
    }
  }
  return out;
}

int eval_signal(const SignalExpr& e, const Env& env) {
  int acc = e.constant;
  for (const auto& t : e.terms) {
    auto it = env.find(t);
    if (it == env.end()) throw UnboundName("unbound name " + t);
    acc ^= (it->second & 1);
  }
  return acc;
}

std::vector<Command> from_notation_order(std::vector<Command> cmds) {
  std::reverse(cmds.begin(), cmds.end());
  return cmds;
}

Pattern identity_pattern(const std::set<QubitId>& ids) {
  return Pattern{ids, ids, ids, {}};
}

std::set<QubitId> command_qubits(const Command& c) {
  return std::visit(
      [](const auto& cmd) -> std::set<QubitId> {
        using T = std::decay_t<decltype(cmd)>;
        if constexpr (std::is_same_v<T, Entangle>) return {cmd.a, cmd.b};
        else if constexpr (std::is_same_v<T, Nil>) return {};
        else return {cmd.q};
      },
      c);
}

std::set<QubitId> measured_qubits(const std::vector<Command>& cmds) {
  std::set<QubitId> out;
  for (const Command& c : cmds) {
    if (const auto* m = std::get_if<Measure>(&c)) out.insert(m->q);
  }
  return out;
}

std::vector<PatternViolation> validate_pattern(const Pattern& p) {
  std::vector<PatternViolation> out;
  auto report = [&out](int idx, QubitId q, std::string msg) {
    out.push_back(PatternViolation{idx, q, std::move(msg)});
  };

  for (QubitId q : p.inputs) {
    if (!p.space.contains(q)) {
      report(-1, q, "input qubit " + std::to_string(q) + " outside computation space");
    }
  }
  for (QubitId q : p.outputs) {
    if (!p.space.contains(q)) {
      report(-1, q, "output qubit " + std::to_string(q) + " outside computation space");
    }
  }

  std::set<QubitId> measured;
  for (std::size_t i = 0; i < p.commands.size(); ++i) {
    const Command& c = p.commands[i];
    for (QubitId q : command_qubits(c)) {
      if (!p.space.contains(q)) {
        report(int(i), q, "command acts on qubit " + std::to_string(q) +
                              " outside computation space");
      }
      if (measured.contains(q)) {
        if (std::holds_alternative<Measure>(c) &&
            std::get<Measure>(c).q == q) {
          report(int(i), q, "measured twice: " + std::to_string(q));
        } else {
          report(int(i), q,
                 "command acts on qubit " + std::to_string(q) + " after measurement");
        }
      }
    }
    if (const auto* e = std::get_if<Entangle>(&c)) {
      if (e->a == e->b) report(int(i), e->a, "entangle on a single qubit");
    }
    if (const auto* m = std::get_if<Measure>(&c)) measured.insert(m->q);
  }

  for (QubitId q : p.space) {
    const bool is_out = p.outputs.contains(q);
    const bool is_meas = measured.contains(q);
    if (is_out && is_meas) {
      report(-1, q, "output qubit " + std::to_string(q) + " is measured");
    }
    if (!is_out && !is_meas) {
      report(-1, q, "non-output qubit " + std::to_string(q) + " is never measured");
    }
  }
  return out;
}

namespace {

LinOp cz_op(QubitId a, QubitId b) {
  return LinOp{{a, b}, {a, b}, qnum::controlled_z()};
}

LinOp pauli_x_op(QubitId q) { return LinOp{{q}, {q}, qnum::pauli_x()}; }
LinOp pauli_z_op(QubitId q) { return LinOp{{q}, {q}, qnum::pauli_z()}; }

// Isometry adjoining a fresh qubit in |+>.
LinOp plus_iso(QubitId q) {
  Matrix col(2, 1);
  col(0, 0) = col(1, 0) = 1.0 / std::sqrt(2.0);
  return LinOp{{}, {q}, std::move(col)};
}

// <+_a| (outcome 0) or <-_a| (outcome 1) as a destructive projector row.
LinOp projector(QubitId q, double angle, int outcome) {
  Matrix row(1, 2);
  const Complex phase = std::exp(Complex(0.0, -angle));
  row(0, 0) = 1.0 / std::sqrt(2.0);
  row(0, 1) = (outcome ? -phase : phase) / std::sqrt(2.0);
  return LinOp{{q}, {}, std::move(row)};
}

double actual_angle(const Measure& m, const Env& env) {
  const int s = eval_signal(m.s_dep, env);
  const int t = eval_signal(m.t_dep, env);
  return (s ? -m.angle : m.angle) + t * std::numbers::pi;
}

Env merged(const Env& a, const Env& b) {
  Env out = a;
  for (const auto& [k, v] : b) out[k] = v;
  return out;
}

void require_valid(const Pattern& p) {
  auto violations = validate_pattern(p);
  if (!violations.empty()) throw InvalidPattern(violations.front().message);
}

std::vector<QubitId> sorted(const std::set<QubitId>& s) {
  return std::vector<QubitId>(s.begin(), s.end());
}

}  // namespace

std::vector<ExecBranch> exec_pattern(const QRegisterState& state, const Pattern& p,
                                     const Env& env) {
  require_valid(p);
  for (QubitId q : p.inputs) {
    if (!state.has_id(q)) {
      throw UnknownQubit("pattern input qubit " + std::to_string(q) + " not in state");
    }
  }

  struct Work {
    QRegisterState state;
    Env bindings;
  };

  QRegisterState init = state;
  for (QubitId q : p.space) {
    if (p.inputs.contains(q)) continue;
    if (state.has_id(q)) {
      throw InvalidPattern("computation qubit " + std::to_string(q) +
                           " already present in state");
    }
    init = qnum::tensor(init, QRegisterState::plus(q));
  }

  std::vector<Work> branches;
  branches.push_back(Work{std::move(init), {}});

  for (const Command& c : p.commands) {
    if (std::holds_alternative<Nil>(c)) continue;
    std::vector<Work> next;
    next.reserve(branches.size());
    for (Work& w : branches) {
      if (const auto* e = std::get_if<Entangle>(&c)) {
        next.push_back(Work{qnum::embed_apply(cz_op(e->a, e->b), w.state),
                            std::move(w.bindings)});
      } else if (const auto* x = std::get_if<CorrectX>(&c)) {
        const int bit = eval_signal(x->dep, merged(env, w.bindings));
        next.push_back(Work{bit ? qnum::embed_apply(pauli_x_op(x->q), w.state)
                                : std::move(w.state),
                            std::move(w.bindings)});
      } else if (const auto* z = std::get_if<CorrectZ>(&c)) {
        const int bit = eval_signal(z->dep, merged(env, w.bindings));
        next.push_back(Work{bit ? qnum::embed_apply(pauli_z_op(z->q), w.state)
                                : std::move(w.state),
                            std::move(w.bindings)});
      } else {
        const auto& m = std::get<Measure>(c);
        const double a = actual_angle(m, merged(env, w.bindings));
        for (int outcome = 0; outcome < 2; ++outcome) {
          QRegisterState branch =
              qnum::embed_apply(projector(m.q, a, outcome), w.state);
          if (branch.weight() <= qnum::kPruneTol) continue;
          Env b = w.bindings;
          b[signal_name(m.q)] = outcome;
          next.push_back(Work{std::move(branch), std::move(b)});
        }
      }
    }
    branches = std::move(next);
  }

  std::vector<ExecBranch> out;
  out.reserve(branches.size());
  for (Work& w : branches) {
    const double prob = w.state.weight();
    out.push_back(ExecBranch{w.state.normalized(), prob, std::move(w.bindings)});
  }
  return out;
}

LinOp branch_operator(const Pattern& p, const std::map<QubitId, int>& signals,
                      const Env& env) {
  require_valid(p);
  const std::set<QubitId> measured = measured_qubits(p.commands);
  for (QubitId q : measured) {
    if (!signals.contains(q)) {
      throw IncompleteSignals("no outcome assigned to measured qubit " +
                              std::to_string(q));
    }
  }

  Env full = env;
  for (const auto& [q, bit] : signals) full[signal_name(q)] = bit & 1;

  LinOp acc = LinOp::identity(sorted(p.inputs));
  for (QubitId q : p.space) {
    if (!p.inputs.contains(q)) acc = qnum::compose_on_register(plus_iso(q), acc);
  }

  for (const Command& c : p.commands) {
    if (std::holds_alternative<Nil>(c)) continue;
    if (const auto* e = std::get_if<Entangle>(&c)) {
      acc = qnum::compose_on_register(cz_op(e->a, e->b), acc);
    } else if (const auto* x = std::get_if<CorrectX>(&c)) {
      if (eval_signal(x->dep, full)) {
        acc = qnum::compose_on_register(pauli_x_op(x->q), acc);
      }
    } else if (const auto* z = std::get_if<CorrectZ>(&c)) {
      if (eval_signal(z->dep, full)) {
        acc = qnum::compose_on_register(pauli_z_op(z->q), acc);
      }
    } else {
      const auto& m = std::get<Measure>(c);
      acc = qnum::compose_on_register(
          projector(m.q, actual_angle(m, full), signals.at(m.q) & 1), acc);
    }
  }
  return qnum::reorder_out(acc, sorted(p.outputs));
}

std::vector<std::pair<std::map<QubitId, int>, LinOp>> all_branch_operators(
    const Pattern& p, const Env& env) {
  const std::vector<QubitId> measured = sorted(measured_qubits(p.commands));
  std::vector<std::pair<std::map<QubitId, int>, LinOp>> out;
  const std::size_t count = std::size_t(1) << measured.size();
  for (std::size_t m = 0; m < count; ++m) {
    std::map<QubitId, int> signals;
    for (std::size_t k = 0; k < measured.size(); ++k) {
      signals[measured[k]] = int(m >> (measured.size() - 1 - k)) & 1;
    }
    LinOp op = branch_operator(p, signals, env);
    if (op.matrix.norm() <= qnum::kPruneTol) continue;
    out.emplace_back(std::move(signals), std::move(op));
  }
  return out;
}

}  // namespace mcnet::calculus
