#pragma once

// Seeded generator of small well-formed measurement patterns for property
// tests.

#include <random>
#include <set>
#include <vector>

#include "mcnet/calculus.hpp"

namespace testutil {

using mcnet::calculus::Command;
using mcnet::calculus::CorrectX;
using mcnet::calculus::CorrectZ;
using mcnet::calculus::Entangle;
using mcnet::calculus::Measure;
using mcnet::calculus::Pattern;
using mcnet::calculus::SignalExpr;
using mcnet::qnum::QubitId;

struct PatternGenOptions {
  int max_qubits = 4;
  int max_measurements = 3;
  int first_id = 1;
  // names the dependency expressions may draw on besides earlier signals
  std::vector<std::string> env_names;
};

inline SignalExpr random_expr(const std::vector<std::string>& pool,
                              std::mt19937_64& rng) {
  SignalExpr e = SignalExpr::bit(int(rng() % 2));
  if (pool.empty()) return e;
  const std::size_t picks = rng() % std::min<std::size_t>(pool.size() + 1, 3);
  for (std::size_t i = 0; i < picks; ++i) {
    e = e + SignalExpr::name(pool[rng() % pool.size()]);
  }
  return e;
}

inline Pattern random_pattern(const PatternGenOptions& opt, std::mt19937_64& rng) {
  const int n = 1 + int(rng() % std::max(1, opt.max_qubits));
  std::vector<QubitId> qubits;
  for (int i = 0; i < n; ++i) qubits.push_back(opt.first_id + i);

  const int measurable = std::min<int>(opt.max_measurements, n);
  const int n_meas = measurable == 0 ? 0 : int(rng() % (measurable + 1));
  std::vector<QubitId> to_measure(qubits.begin(), qubits.begin() + n_meas);

  Pattern p;
  p.space.insert(qubits.begin(), qubits.end());
  for (QubitId q : qubits) {
    if (rng() % 2) p.inputs.insert(q);
  }
  for (int k = n_meas; k < n; ++k) p.outputs.insert(qubits[k]);

  static const double angles[] = {0.0, 0.25, 0.5, -0.25, 1.0, 0.789};

  std::vector<std::string> dep_pool = opt.env_names;
  std::set<QubitId> alive(qubits.begin(), qubits.end());
  std::vector<Command> cmds;
  std::size_t next_meas = 0;
  while (next_meas < to_measure.size() || cmds.size() < std::size_t(n)) {
    const int kind = int(rng() % 4);
    if (kind == 0 && alive.size() >= 2) {
      std::vector<QubitId> pool(alive.begin(), alive.end());
      QubitId a = pool[rng() % pool.size()];
      QubitId b = pool[rng() % pool.size()];
      if (a != b) cmds.push_back(Entangle{a, b});
    } else if (kind == 1 && !alive.empty()) {
      std::vector<QubitId> pool(alive.begin(), alive.end());
      QubitId q = pool[rng() % pool.size()];
      if (rng() % 2) {
        cmds.push_back(CorrectX{q, random_expr(dep_pool, rng)});
      } else {
        cmds.push_back(CorrectZ{q, random_expr(dep_pool, rng)});
      }
    } else if (next_meas < to_measure.size()) {
      const QubitId q = to_measure[next_meas++];
      Measure m;
      m.q = q;
      m.angle = angles[rng() % 6] * 3.14159265358979323846;
      m.s_dep = random_expr(dep_pool, rng);
      m.t_dep = random_expr(dep_pool, rng);
      cmds.push_back(m);
      alive.erase(q);
      dep_pool.push_back(mcnet::calculus::signal_name(q));
    } else if (cmds.size() >= std::size_t(n)) {
      break;
    }
    if (cmds.size() > std::size_t(4 * n + 8)) break;  // keep patterns small
  }
  p.commands = std::move(cmds);
  return p;
}

}  // namespace testutil
