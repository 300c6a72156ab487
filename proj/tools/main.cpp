// mcnet: interpreter and equivalence checker for networks of
// measurement-calculus agents.
//
// Exit codes: 0 pass/true, 1 fail/false (with witness), 2 usage or
// parse/validation error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mcnet/parser.hpp"
#include "mcnet/protocols.hpp"
#include "mcnet/report.hpp"
#include "mcnet/semantics.hpp"

namespace {

using mcnet::calculus::Env;
using mcnet::net::Network;
using mcnet::qnum::QRegisterState;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError{"cannot open " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// a network argument is a source file or a library protocol name
Network resolve_network(const std::string& arg) {
  if (std::filesystem::exists(arg)) {
    auto parsed = mcnet::dsl::parse_network(read_file(arg), arg);
    if (!parsed.ok()) {
      std::cerr << mcnet::dsl::format_diagnostics(parsed.diagnostics);
      throw UsageError{"invalid network source " + arg};
    }
    return parsed.main();
  }
  if (mcnet::protocols::is_library_name(arg)) return mcnet::protocols::library(arg);
  throw UsageError{"no such file or library protocol: " + arg};
}

mcnet::dsl::InputDocument load_inputs(const std::string& path) {
  if (path.empty()) return {};
  auto parsed = mcnet::dsl::parse_inputs(read_file(path), path);
  if (!parsed.ok()) {
    std::cerr << mcnet::dsl::format_diagnostics(parsed.diagnostics);
    throw UsageError{"invalid inputs document " + path};
  }
  return parsed.doc;
}

// missing classical bits default to 0, missing quantum inputs to |0...0>
Env build_cin(const Network& n, const mcnet::dsl::InputDocument& doc) {
  Env cin;
  for (const auto& name : n.all_cin()) {
    auto it = doc.bits.find(name);
    cin[name] = it == doc.bits.end() ? 0 : it->second;
  }
  return cin;
}

std::vector<QRegisterState> build_qin(const Network& n,
                                      const mcnet::dsl::InputDocument& doc) {
  std::vector<QRegisterState> qin;
  for (std::size_t i = 0; i < n.agents.size(); ++i) {
    const auto ids = n.input_ids(i);
    auto it = doc.states.find(n.agents[i].name);
    if (it != doc.states.end()) {
      qin.push_back(it->second);
    } else if (ids.empty()) {
      qin.push_back(QRegisterState::vacuum());
    } else {
      qin.push_back(QRegisterState::basis(ids, 0));
    }
  }
  return qin;
}

mcnet::sem::Schedule build_schedule(const Network& n, const std::string& spec) {
  if (spec.empty() || spec == "round-robin") {
    return mcnet::sem::Schedule::canonical(n);
  }
  std::vector<std::string> names;
  std::string cur;
  for (char c : spec) {
    if (c == ',') {
      if (!cur.empty()) names.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) names.push_back(cur);
  return mcnet::sem::Schedule::from_names(n, names);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interpreter and semantic toolkit for networks of measurement-calculus agents"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "execute a network and print its transition system");
  std::string run_file, run_inputs, run_schedule = "round-robin";
  bool run_paths = false;
  run->add_option("file", run_file, "network source file or library name")->required();
  run->add_option("--inputs", run_inputs, "inputs document (bit/state declarations)");
  run->add_option("--schedule", run_schedule,
                  "round-robin (default) or a comma-separated agent order");
  run->add_flag("--no-merge", run_paths,
                "also print every raw path instead of only merged classes");

  // denote
  auto* denote = app.add_subcommand("denote", "print the denotational semantics");
  std::string denote_file;
  bool denote_elements = false, denote_choi = false;
  denote->add_option("file", denote_file, "network source file or library name")->required();
  denote->add_flag("--elements", denote_elements, "include Kraus element matrices");
  denote->add_flag("--choi", denote_choi, "include per-class Choi matrices");

  // equiv
  auto* equiv = app.add_subcommand("equiv", "decide operational equivalence (bisimilarity)");
  std::string equiv_a, equiv_b;
  double equiv_tol = 1e-9;
  equiv->add_option("a", equiv_a, "first network")->required();
  equiv->add_option("b", equiv_b, "second network")->required();
  equiv->add_option("--tol", equiv_tol, "Choi distance tolerance");

  // schedules
  auto* schedules = app.add_subcommand("schedules", "check schedule independence");
  std::string sched_file, sched_inputs;
  std::size_t sched_limit = 10000;
  schedules->add_option("file", sched_file, "network source file or library name")->required();
  schedules->add_option("--inputs", sched_inputs, "inputs document");
  schedules->add_option("--limit", sched_limit, "interleaving enumeration limit");

  // context
  auto* context = app.add_subcommand("context", "check behavior inside entanglement contexts");
  std::string ctx_file;
  int ctx_extra = 1, ctx_trials = 10;
  unsigned ctx_seed = 0;
  double ctx_tol = 1e-9;
  context->add_option("file", ctx_file, "network source file or library name")->required();
  context->add_option("--extra", ctx_extra, "number of spectator qubits");
  context->add_option("--trials", ctx_trials, "number of random joint states");
  context->add_option("--seed", ctx_seed, "RNG seed");
  context->add_option("--tol", ctx_tol, "deviation tolerance");

  // compose
  auto* compose = app.add_subcommand("compose", "compose two networks and write the result");
  std::string comp_a, comp_b, comp_out = "-";
  bool comp_seq = false, comp_par = false;
  compose->add_option("a", comp_a, "first network")->required();
  compose->add_option("b", comp_b, "second network")->required();
  compose->add_flag("--seq", comp_seq, "sequential composition");
  compose->add_flag("--par", comp_par, "parallel composition");
  compose->add_option("-o,--output", comp_out, "output file ('-' for stdout)");

  // validate
  auto* validate = app.add_subcommand("validate", "check a source against H0-H3");
  std::string val_file;
  validate->add_option("file", val_file, "network source file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) {
      Network n = resolve_network(run_file);
      auto doc = load_inputs(run_inputs);
      const Env cin = build_cin(n, doc);
      const auto qin = build_qin(n, doc);
      mcnet::sem::RunOptions opts;
      opts.keep_paths = run_paths;
      auto pts = mcnet::sem::run_schedule(n, cin, qin, build_schedule(n, run_schedule), opts);
      std::cout << mcnet::report::render_report(n, pts, run_schedule, cin, qin);
      return kExitPass;
    }
    if (*denote) {
      Network n = resolve_network(denote_file);
      auto d = mcnet::sem::denotational(n);
      std::cout << mcnet::report::render_report(d, denote_elements, denote_choi);
      return kExitPass;
    }
    if (*equiv) {
      Network a = resolve_network(equiv_a);
      Network b = resolve_network(equiv_b);
      auto res = mcnet::sem::equivalent(a, b, equiv_tol);
      std::cout << mcnet::report::render_report(res, equiv_tol);
      return res.equivalent ? kExitPass : kExitFail;
    }
    if (*schedules) {
      Network n = resolve_network(sched_file);
      auto doc = load_inputs(sched_inputs);
      auto res = mcnet::sem::check_schedules(n, build_cin(n, doc), build_qin(n, doc),
                                             sched_limit);
      std::cout << mcnet::report::render_report(res);
      return res.pass ? kExitPass : kExitFail;
    }
    if (*context) {
      Network n = resolve_network(ctx_file);
      auto res = mcnet::sem::check_context(n, ctx_extra, ctx_trials, ctx_seed, ctx_tol);
      std::cout << mcnet::report::render_report(res, ctx_tol);
      return res.pass ? kExitPass : kExitFail;
    }
    if (*compose) {
      if (comp_seq == comp_par) {
        throw UsageError{"pass exactly one of --seq or --par"};
      }
      Network a = resolve_network(comp_a);
      Network b = resolve_network(comp_b);
      Network composed = comp_seq ? mcnet::net::net_seq_compose(a, b)
                                  : mcnet::net::net_par_compose(a, b);
      auto violations = mcnet::net::validate_network(composed);
      if (!violations.empty()) {
        for (const auto& v : violations) {
          std::cerr << "error: " << v.code << ": " << v.message << "\n";
        }
        return kExitUsage;
      }
      const std::string text = mcnet::dsl::render_network(composed, "composed");
      if (comp_out == "-") {
        std::cout << text;
      } else {
        std::ofstream out(comp_out, std::ios::binary);
        if (!out) throw UsageError{"cannot write " + comp_out};
        out << text;
      }
      return kExitPass;
    }
    if (*validate) {
      auto parsed = mcnet::dsl::parse_network(read_file(val_file), val_file);
      std::cout << mcnet::report::render_validation(parsed.diagnostics);
      std::cerr << mcnet::dsl::format_diagnostics(parsed.diagnostics);
      return parsed.ok() ? kExitPass : kExitUsage;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitUsage;
  } catch (const mcnet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
