#pragma once

#include <map>
#include <string>
#include <vector>

#include "mcnet/netmodel.hpp"

namespace mcnet::dsl {

struct SourceSpan {
  std::string file;
  int line = 0;          // 1-based
  int column = 0;        // 1-based
  int end_line = 0;
  int end_column = 0;
};

enum class Severity { Error, Warning };

struct ParseDiagnostic {
  Severity severity;
  std::string message;
  SourceSpan span;
};

/// Networks defined by one source file, in definition order. Commands like
/// `run` operate on the last definition.
struct ParseResult {
  std::vector<std::pair<std::string, net::Network>> networks;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const;
  const net::Network& main() const;  // last network; throws when !ok()
};

/// Parses and validates protocol sources. Syntax errors, unknown names and
/// H0-H3 violations all surface as diagnostics with source spans.
ParseResult parse_network(const std::string& text,
                          const std::string& filename = "<input>");

/// Canonical source text for a network; parse(render(n)) reproduces n.
std::string render_network(const net::Network& n, const std::string& name = "N");

/// One line per diagnostic: file:line:col: severity: message.
std::string format_diagnostics(const std::vector<ParseDiagnostic>& diagnostics);

/// Classical bits and per-agent input states supplied to `run`.
struct InputDocument {
  calculus::Env bits;
  std::map<std::string, qnum::QRegisterState> states;  // agent name -> state
};

struct InputParseResult {
  InputDocument doc;
  std::vector<ParseDiagnostic> diagnostics;
  bool ok() const;
};

InputParseResult parse_inputs(const std::string& text,
                              const std::string& filename = "<inputs>");

}  // namespace mcnet::dsl
