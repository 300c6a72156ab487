#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mcnet/netmodel.hpp"

namespace mcnet::sem {

using calculus::Env;
using net::Network;
using qnum::QRegisterState;
using qnum::QubitId;

struct AgentRuntime {
  Env env;                  // classical bindings accumulated so far
  std::size_t next_event = 0;
  std::set<QubitId> sort;
};

/// A node of the transition system: the global quantum state plus every
/// agent's environment, remaining events and sort.
struct Configuration {
  QRegisterState qstate;
  std::vector<AgentRuntime> agents;
};

bool finished(const Network& n, const Configuration& c);

enum class RuleKind { LocalPattern, ClassicalRendezvous, QuantumRendezvous };

/// One way the configuration can fire: a head-of-sequence pattern, or a
/// matched send/receive pair (agent = sender, peer = receiver).
struct RuleInstance {
  RuleKind kind;
  int agent;
  int peer = -1;

  bool operator==(const RuleInstance&) const = default;
};

std::vector<RuleInstance> enabled(const Network& n, const Configuration& c);

/// Fires one rule instance; pattern events produce one configuration per
/// surviving measurement branch with its probability, rendezvous steps are
/// deterministic (lambda = 1).
std::vector<std::pair<Configuration, double>> step(const Network& n,
                                                   const Configuration& c,
                                                   const RuleInstance& inst);

struct StepRecord {
  RuleKind kind;
  std::string description;
  double lambda;
};

struct PathRecord {
  std::vector<StepRecord> steps;
  double lambda;  // product of step probabilities
};

/// Equivalence class of final configurations: identical sorts and observable
/// classical outputs, and the same final quantum state within tolerance.
struct FinalClass {
  std::vector<std::set<QubitId>> sorts;  // per agent
  std::vector<Env> couts;                // per agent, restricted to cout
  QRegisterState qfinal;                 // mixed form, normalized, sorted ids
};

struct PTS {
  std::vector<std::pair<FinalClass, double>> classes;
  std::vector<PathRecord> paths;  // populated when keep_paths was requested
};

/// Deterministic scheduling policy: the enabled instance whose lowest-ranked
/// participant comes first fires. Default rank is declaration order.
struct Schedule {
  std::vector<int> rank;  // agent index -> rank

  static Schedule canonical(const Network& n);
  static Schedule from_names(const Network& n, const std::vector<std::string>& order);
};

struct RunOptions {
  bool keep_paths = false;
};

Configuration init_configuration(const Network& n, const Env& cin,
                                 const std::vector<QRegisterState>& qin);
/// Initialization from a joint input state covering all agent inputs; extra
/// ids in `joint` ride along untouched (entanglement contexts).
Configuration init_with_joint(const Network& n, const Env& cin,
                              const QRegisterState& joint);

PTS run_schedule(const Network& n, const Env& cin,
                 const std::vector<QRegisterState>& qin, const Schedule& s,
                 const RunOptions& opts = {});
PTS run_from(const Network& n, Configuration initial, const Schedule& s,
             const RunOptions& opts = {});

/// Canonical-schedule operational semantics.
PTS operational(const Network& n, const Env& cin,
                const std::vector<QRegisterState>& qin);

/// One restricted (possibly trace-decreasing) operation: the Kraus elements
/// compatible with the classical output assignment `outs`.
struct DenotationGroup {
  Env outs;         // full output assignment (external + signal part)
  Env signal_outs;  // restriction to measurement-dependent names
  qnum::KrausSet kraus;
};

struct DenotationEntry {
  Env cin;
  Env external_outs;
  std::vector<DenotationGroup> groups;
  qnum::KrausSet total() const;
};

/// Type plus, for each classical input assignment, the family of restricted
/// quantum operations keyed by signal output.
struct Denotation {
  std::vector<std::string> agent_names;
  std::vector<std::set<QubitId>> initial_sorts;
  std::vector<std::set<QubitId>> final_sorts;
  std::vector<std::vector<QubitId>> inputs_by_agent;   // sorted per agent
  std::vector<std::vector<QubitId>> outputs_by_agent;  // sorted per agent
  std::vector<QubitId> in_ids;   // canonical order: agent-wise concatenation
  std::vector<QubitId> out_ids;  // agent-wise concatenation + unowned ids
  std::set<std::string> cin_names;
  std::set<std::string> signal_out_names;
  std::set<std::string> external_out_names;
  std::vector<DenotationEntry> table;  // one entry per cin assignment

  const DenotationEntry& entry(const Env& cin) const;
};

Denotation denotational(const Network& n);

struct EquivResult {
  bool equivalent;
  std::string witness;  // distinguishing input/class/distance when not
  double max_choi_dist;
};

/// Decides operational equivalence (bisimilarity): matching types up to
/// agent-position correspondence and id relabeling, equal external outputs,
/// corresponding signal-output classes, and restricted channels equal within
/// `tol` in Choi distance.
EquivResult equivalent(const Network& n1, const Network& n2,
                       double tol = qnum::kMatTol);

struct ScheduleCheck {
  bool pass;
  std::size_t interleavings;  // maximal interleavings explored
  bool truncated;             // enumeration stopped at the limit
  std::string witness;
};

/// Enumerates all maximal interleavings and checks that every resolution of
/// the nondeterminism yields the same PTS.
ScheduleCheck check_schedules(const Network& n, const Env& cin,
                              const std::vector<QRegisterState>& qin,
                              std::size_t limit = 10000);

struct ContextCheck {
  bool pass;
  double max_deviation;
  int trials;
  int extra_qubits;
  unsigned seed;
};

/// Feeds random joint states psi_AC through the network (C untouched) and
/// compares the simulated output with sum_k (L_k (x) I_C) psi (L_k (x) I_C)^dag.
ContextCheck check_context(const Network& n, int extra_qubits, int trials,
                           unsigned seed, double tol = qnum::kMatTol);

enum class ComposeMode { Seq, Par };

struct ComposeCheck {
  bool pass;
  double max_choi_dist;
  std::string witness;
};

/// Compares the denotation of the composed network against the composition
/// of the factor denotations (restricted-class-wise, identity padded).
ComposeCheck check_compose(const Network& n1, const Network& n2, ComposeMode mode,
                           double tol = qnum::kMatTol);

/// All assignments over `names` in binary counting order (first name = most
/// significant bit).
std::vector<Env> enumerate_assignments(const std::set<std::string>& names);

}  // namespace mcnet::sem
