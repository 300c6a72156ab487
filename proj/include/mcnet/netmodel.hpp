#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mcnet/calculus.hpp"
#include "mcnet/qnum.hpp"

namespace mcnet::net {

using calculus::Env;
using calculus::SignalExpr;
using qnum::QubitId;

/// Local pattern execution; inputs are resolved against the agent's sort at
/// the moment the event fires (sort intersected with the computation space).
struct PatternEvent {
  std::vector<calculus::Command> commands;

  std::set<QubitId> space() const;
  std::set<QubitId> measured() const;
  /// Full pattern with inputs fixed by the executing agent's sort.
  calculus::Pattern resolve(const std::set<QubitId>& sort) const;

  bool operator==(const PatternEvent&) const = default;
};

struct ClassicalRecv {
  std::string channel;
  std::vector<std::string> names;  // ordered, non-empty
  bool operator==(const ClassicalRecv&) const = default;
};

struct ClassicalSend {
  std::string channel;
  std::vector<SignalExpr> values;  // ordered, non-empty
  bool operator==(const ClassicalSend&) const = default;
};

struct QuantumRecv {
  std::string channel;
  QubitId qubit;  // the reference the incoming qubit is known by
  bool operator==(const QuantumRecv&) const = default;
};

struct QuantumSend {
  std::string channel;
  QubitId qubit;
  bool operator==(const QuantumSend&) const = default;
};

using Event =
    std::variant<PatternEvent, ClassicalRecv, ClassicalSend, QuantumRecv, QuantumSend>;

struct Agent {
  std::string name;
  std::set<std::string> cin;   // classical input names
  std::set<std::string> cout;  // classical output names
  std::set<QubitId> sort;      // owned qubits (local inputs + shared prep)
  std::vector<Event> events;

  bool operator==(const Agent&) const = default;
};

/// Shared preparation: absent, an entangle-only pattern over fresh |+>
/// qubits, or an explicit pure state.
class Preparation {
public:
  Preparation() = default;
  static Preparation none() { return Preparation(); }
  static Preparation entangle(std::set<QubitId> space,
                              std::vector<calculus::Entangle> pairs);
  static Preparation state(qnum::QRegisterState s);

  bool is_none() const { return kind_ == Kind::None; }
  bool is_pattern() const { return kind_ == Kind::Pattern; }
  bool is_state() const { return kind_ == Kind::State; }

  std::set<QubitId> ids() const;
  /// Materialized preparation state (vacuum when absent).
  qnum::QRegisterState materialize() const;

  const std::set<QubitId>& pattern_space() const { return space_; }
  const std::vector<calculus::Entangle>& pattern_pairs() const { return pairs_; }
  const qnum::QRegisterState& explicit_state() const;

  bool operator==(const Preparation& other) const;

private:
  enum class Kind { None, Pattern, State };
  Kind kind_ = Kind::None;
  std::set<QubitId> space_;
  std::vector<calculus::Entangle> pairs_;
  std::optional<qnum::QRegisterState> state_;
};

struct Network {
  std::vector<Agent> agents;
  Preparation prep;

  bool operator==(const Network&) const = default;

  const Agent* find_agent(const std::string& name) const;
  int agent_index(const std::string& name) const;  // -1 when absent
  /// Local quantum input ids of agent i: sort minus preparation ids.
  std::vector<QubitId> input_ids(std::size_t i) const;
  /// All classical input names across agents.
  std::set<std::string> all_cin() const;
  std::set<std::string> all_cout() const;
};

struct Violation {
  std::string code;     // H0..H3, SIGMA
  std::string message;
  int agent = -1;       // index into agents, -1 for network-level
  int event = -1;       // index into the agent's events, -1 when n/a
};

/// Checks the definiteness conditions H0-H3 plus sort disjointness and
/// preparation coverage; returns every violation found.
std::vector<Violation> validate_network(const Network& n);

/// Final sort after replaying the agent's events. Throws UnknownQubit when an
/// event references a qubit outside the running sort.
std::set<QubitId> output_sort(const Agent& a);

/// Sequential composition of two programs for the same party (same name).
/// Classical and quantum interfaces merge as i1 u (i2 \ o1), o1 u o2,
/// Q1 u (Q2 \ Q1') with Q1' the output sort of the first program.
Agent agent_compose(const Agent& first, const Agent& second);

/// Agent-wise sequential composition; missing agent names are padded with
/// null agents, preparations are tensored.
Network net_seq_compose(const Network& n1, const Network& n2);

/// Side-by-side composition of networks over disjoint parties.
Network net_par_compose(const Network& n1, const Network& n2);

/// Every qubit id an agent's definition references.
std::set<QubitId> used_qubits(const Agent& a);
/// Every classical name an agent binds over a complete run.
std::set<std::string> bound_names(const Agent& a);

}  // namespace mcnet::net
