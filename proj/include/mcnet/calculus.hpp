#pragma once

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mcnet/qnum.hpp"

namespace mcnet::calculus {

using qnum::QubitId;
using Env = std::map<std::string, int>;

/// Name of the signal variable bound by measuring qubit `q`.
std::string signal_name(QubitId q);

/// Mod-2 sum of a constant bit and a set of named bits (signal variables s_i
/// and classical input variables x_i).
struct SignalExpr {
  int constant = 0;
  std::set<std::string> terms;

  static SignalExpr bit(int b) { return SignalExpr{b & 1, {}}; }
  static SignalExpr name(std::string n) { return SignalExpr{0, {std::move(n)}}; }
  /// Mod-2 addition; repeated terms cancel.
  SignalExpr operator+(const SignalExpr& other) const;
  bool is_constant() const { return terms.empty(); }
  bool operator==(const SignalExpr&) const = default;
};

int eval_signal(const SignalExpr& e, const Env& env);

struct Entangle {
  QubitId a, b;
  bool operator==(const Entangle&) const = default;
};
struct Measure {
  QubitId q;
  double angle = 0.0;
  SignalExpr s_dep;  // sign dependency: angle -> (-1)^s * angle
  SignalExpr t_dep;  // shift dependency: angle -> angle + t*pi
  bool operator==(const Measure&) const = default;
};
struct CorrectX {
  QubitId q;
  SignalExpr dep;
  bool operator==(const CorrectX&) const = default;
};
struct CorrectZ {
  QubitId q;
  SignalExpr dep;
  bool operator==(const CorrectZ&) const = default;
};
struct Nil {
  bool operator==(const Nil&) const = default;
};

using Command = std::variant<Entangle, Measure, CorrectX, CorrectZ, Nil>;

/// A measurement pattern over computation space V with inputs I and outputs O.
/// `commands` are stored in application order (front executes first); the
/// textual notation lists them reversed, rightmost first.
struct Pattern {
  std::set<QubitId> space;    // V
  std::set<QubitId> inputs;   // I, subset of V
  std::set<QubitId> outputs;  // O, subset of V
  std::vector<Command> commands;

  bool operator==(const Pattern&) const = default;
};

/// Reverses a command list from notation order into application order.
std::vector<Command> from_notation_order(std::vector<Command> cmds);

/// Identity pattern on `ids` (no commands, I = O = V).
Pattern identity_pattern(const std::set<QubitId>& ids);

/// Set of qubits a command touches.
std::set<QubitId> command_qubits(const Command& c);
/// Qubits measured by the command sequence.
std::set<QubitId> measured_qubits(const std::vector<Command>& cmds);

struct PatternViolation {
  int command_index;  // -1 when not tied to a command
  QubitId qubit;      // -1 when not tied to a qubit
  std::string message;
};

/// All well-formedness violations: non-output qubits measured exactly once,
/// no command on a measured qubit, I/O contained in V, E on distinct qubits.
std::vector<PatternViolation> validate_pattern(const Pattern& p);

/// One measurement branch produced by executing a pattern.
struct ExecBranch {
  qnum::QRegisterState state;  // renormalized
  double prob;                 // branch weight before renormalization
  Env bindings;                // s_i for each measured qubit
};

/// Big-step pattern execution on a register state. Non-input pattern qubits
/// are adjoined in |+>, commands run in application order, measurement splits
/// into outcome branches; branches with probability below kPruneTol are
/// dropped. `env` supplies values for dependency names not bound inside the
/// pattern.
std::vector<ExecBranch> exec_pattern(const qnum::QRegisterState& state,
                                     const Pattern& p, const Env& env);

/// Composite operator H_I -> H_O for one assignment of measurement outcomes:
/// preparation isometry, command matrices, and the selected projectors.
/// embed_apply of the result reproduces the matching unrenormalized
/// exec_pattern branch.
qnum::LinOp branch_operator(const Pattern& p, const std::map<QubitId, int>& signals,
                            const Env& env);

/// Every branch operator of `p`, keyed by the signal assignment over the
/// measured qubits; identically zero operators are dropped.
std::vector<std::pair<std::map<QubitId, int>, qnum::LinOp>> all_branch_operators(
    const Pattern& p, const Env& env);

}  // namespace mcnet::calculus
