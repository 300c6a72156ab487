#pragma once

#include <string>

#include "mcnet/parser.hpp"
#include "mcnet/semantics.hpp"

namespace mcnet::report {

/// Deterministic machine-parseable reports: stable key order, probabilities
/// to 12 decimal digits, complex entries as re/im pairs. Byte-identical
/// across runs for identical inputs and seeds.

std::string render_report(const net::Network& n, const sem::PTS& pts,
                          const std::string& schedule, const calculus::Env& cin,
                          const std::vector<qnum::QRegisterState>& qin);
std::string render_report(const sem::Denotation& d, bool include_elements,
                          bool include_choi);
std::string render_report(const sem::EquivResult& r, double tol);
std::string render_report(const sem::ScheduleCheck& r);
std::string render_report(const sem::ContextCheck& r, double tol);
std::string render_report(const sem::ComposeCheck& r, double tol);
std::string render_validation(const std::vector<dsl::ParseDiagnostic>& diagnostics);

/// Fixed 12-decimal probability rendering used across reports.
std::string format_prob(double p);

}  // namespace mcnet::report
