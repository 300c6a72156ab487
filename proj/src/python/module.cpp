// Python bindings for the network interpreter and its semantic checks.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mcnet/parser.hpp"
#include "mcnet/protocols.hpp"
#include "mcnet/report.hpp"
#include "mcnet/semantics.hpp"

namespace py = pybind11;

using mcnet::calculus::Env;
using mcnet::net::Network;
using mcnet::qnum::QRegisterState;
using mcnet::qnum::Vector;

namespace {

Network parse_or_throw(const std::string& text, const std::string& filename) {
  auto result = mcnet::dsl::parse_network(text, filename);
  if (!result.ok()) {
    throw py::value_error(mcnet::dsl::format_diagnostics(result.diagnostics));
  }
  return result.main();
}

std::vector<QRegisterState> build_qin(const Network& n,
                                      const std::map<std::string, Vector>& states) {
  std::vector<QRegisterState> qin;
  for (std::size_t i = 0; i < n.agents.size(); ++i) {
    const auto ids = n.input_ids(i);
    auto it = states.find(n.agents[i].name);
    if (it != states.end()) {
      qin.push_back(QRegisterState::pure(ids, it->second));
    } else if (ids.empty()) {
      qin.push_back(QRegisterState::vacuum());
    } else {
      qin.push_back(QRegisterState::basis(ids, 0));
    }
  }
  return qin;
}

Env build_cin(const Network& n, const std::map<std::string, int>& bits) {
  Env cin;
  for (const auto& name : n.all_cin()) {
    auto it = bits.find(name);
    cin[name] = it == bits.end() ? 0 : it->second;
  }
  return cin;
}

py::dict env_dict(const Env& env) {
  py::dict out;
  for (const auto& [k, v] : env) out[py::str(k)] = v;
  return out;
}

py::dict pts_dict(const Network& n, const mcnet::sem::PTS& pts) {
  py::list classes;
  for (const auto& [cls, prob] : pts.classes) {
    py::dict c;
    c["probability"] = prob;
    py::dict outs, sorts;
    for (std::size_t i = 0; i < n.agents.size(); ++i) {
      outs[py::str(n.agents[i].name)] = env_dict(cls.couts[i]);
      sorts[py::str(n.agents[i].name)] =
          std::vector<int>(cls.sorts[i].begin(), cls.sorts[i].end());
    }
    c["outputs"] = outs;
    c["sorts"] = sorts;
    c["state_ids"] = cls.qfinal.ids();
    c["state"] = cls.qfinal.density();
    classes.append(c);
  }
  py::dict out;
  out["classes"] = classes;
  py::list paths;
  for (const auto& p : pts.paths) {
    py::dict pd;
    pd["lambda"] = p.lambda;
    py::list steps;
    for (const auto& s : p.steps) steps.append(s.description);
    pd["steps"] = steps;
    paths.append(pd);
  }
  out["paths"] = paths;
  return out;
}

py::dict denotation_dict(const mcnet::sem::Denotation& d) {
  py::dict out;
  py::dict inputs, outputs;
  for (std::size_t i = 0; i < d.agent_names.size(); ++i) {
    inputs[py::str(d.agent_names[i])] = d.inputs_by_agent[i];
    outputs[py::str(d.agent_names[i])] = d.outputs_by_agent[i];
  }
  out["inputs_by_agent"] = inputs;
  out["outputs_by_agent"] = outputs;
  out["input_ids"] = d.in_ids;
  out["output_ids"] = d.out_ids;
  out["classical_inputs"] =
      std::vector<std::string>(d.cin_names.begin(), d.cin_names.end());
  out["signal_outputs"] = std::vector<std::string>(d.signal_out_names.begin(),
                                                   d.signal_out_names.end());
  out["external_outputs"] = std::vector<std::string>(
      d.external_out_names.begin(), d.external_out_names.end());
  py::list table;
  for (const auto& entry : d.table) {
    py::dict e;
    e["inputs"] = env_dict(entry.cin);
    e["external"] = env_dict(entry.external_outs);
    py::list groups;
    for (const auto& g : entry.groups) {
      py::dict gd;
      gd["outputs"] = env_dict(g.outs);
      gd["signal_outputs"] = env_dict(g.signal_outs);
      py::list kraus;
      for (const auto& l : g.kraus.elements) kraus.append(l.matrix);
      gd["kraus"] = kraus;
      gd["choi"] = mcnet::qnum::choi(g.kraus);
      groups.append(gd);
    }
    e["classes"] = groups;
    table.append(e);
  }
  out["table"] = table;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Interpreter and semantic toolkit for networks of measurement-calculus "
      "agents: operational runs, denotational channels, bisimilarity and "
      "schedule/context/composition checks.";

  py::register_exception<mcnet::Error>(m, "McnetError");

  py::class_<Network>(m, "Network")
      .def("__repr__",
           [](const Network& n) {
             return "<mcnet.Network with " + std::to_string(n.agents.size()) +
                    " agent(s)>";
           })
      .def_property_readonly("agent_names",
                             [](const Network& n) {
                               std::vector<std::string> names;
                               for (const auto& a : n.agents) names.push_back(a.name);
                               return names;
                             })
      .def_property_readonly("classical_inputs",
                             [](const Network& n) {
                               const auto s = n.all_cin();
                               return std::vector<std::string>(s.begin(), s.end());
                             })
      .def("input_ids",
           [](const Network& n) {
             py::dict out;
             for (std::size_t i = 0; i < n.agents.size(); ++i) {
               out[py::str(n.agents[i].name)] = n.input_ids(i);
             }
             return out;
           })
      .def("validate",
           [](const Network& n) {
             std::vector<std::string> out;
             for (const auto& v : mcnet::net::validate_network(n)) {
               out.push_back(v.code + ": " + v.message);
             }
             return out;
           })
      .def(
          "render",
          [](const Network& n, const std::string& name) {
            return mcnet::dsl::render_network(n, name);
          },
          py::arg("name") = "N");

  m.def("parse_network", &parse_or_throw, py::arg("text"),
        py::arg("filename") = "<input>",
        "Parse and validate a protocol source; raises ValueError with "
        "diagnostics on failure.");
  m.def("library", &mcnet::protocols::library, py::arg("name"),
        "Built-in protocols: teleport, direct_channel, bitflip(<angle>), "
        "hadamard_pair, superdense.");
  m.def("seq_compose", &mcnet::net::net_seq_compose, py::arg("first"),
        py::arg("second"));
  m.def("par_compose", &mcnet::net::net_par_compose, py::arg("first"),
        py::arg("second"));

  m.def(
      "run",
      [](const Network& n, const std::map<std::string, int>& bits,
         const std::map<std::string, Vector>& states,
         const std::vector<std::string>& schedule, bool keep_paths) {
        mcnet::sem::RunOptions opts;
        opts.keep_paths = keep_paths;
        const auto sched = schedule.empty()
                               ? mcnet::sem::Schedule::canonical(n)
                               : mcnet::sem::Schedule::from_names(n, schedule);
        auto pts = mcnet::sem::run_schedule(n, build_cin(n, bits),
                                            build_qin(n, states), sched, opts);
        return pts_dict(n, pts);
      },
      py::arg("network"), py::arg("bits") = std::map<std::string, int>{},
      py::arg("states") = std::map<std::string, Vector>{},
      py::arg("schedule") = std::vector<std::string>{},
      py::arg("keep_paths") = false,
      "Execute the network; missing classical bits default to 0, missing "
      "quantum inputs to |0...0>. States are amplitude vectors over the "
      "agent's sorted input ids.");

  m.def(
      "denote",
      [](const Network& n) { return denotation_dict(mcnet::sem::denotational(n)); },
      py::arg("network"),
      "Denotational semantics: restricted Kraus families per classical "
      "input, with Choi matrices.");

  m.def(
      "equivalent",
      [](const Network& a, const Network& b, double tol) {
        auto r = mcnet::sem::equivalent(a, b, tol);
        py::dict out;
        out["equivalent"] = r.equivalent;
        out["witness"] = r.witness;
        out["max_choi_distance"] = r.max_choi_dist;
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("tol") = 1e-9,
      "Decide operational equivalence (bisimilarity) of two networks.");

  m.def(
      "check_schedules",
      [](const Network& n, const std::map<std::string, int>& bits,
         const std::map<std::string, Vector>& states, std::size_t limit) {
        auto r = mcnet::sem::check_schedules(n, build_cin(n, bits),
                                             build_qin(n, states), limit);
        py::dict out;
        out["pass"] = r.pass;
        out["interleavings"] = r.interleavings;
        out["truncated"] = r.truncated;
        out["witness"] = r.witness;
        return out;
      },
      py::arg("network"), py::arg("bits") = std::map<std::string, int>{},
      py::arg("states") = std::map<std::string, Vector>{},
      py::arg("limit") = std::size_t(10000));

  m.def(
      "check_context",
      [](const Network& n, int extra, int trials, unsigned seed, double tol) {
        auto r = mcnet::sem::check_context(n, extra, trials, seed, tol);
        py::dict out;
        out["pass"] = r.pass;
        out["max_deviation"] = r.max_deviation;
        out["trials"] = r.trials;
        out["extra_qubits"] = r.extra_qubits;
        out["seed"] = r.seed;
        return out;
      },
      py::arg("network"), py::arg("extra") = 1, py::arg("trials") = 10,
      py::arg("seed") = 0u, py::arg("tol") = 1e-9);

  m.def(
      "check_compose",
      [](const Network& a, const Network& b, const std::string& mode, double tol) {
        const auto m_ = mode == "seq" ? mcnet::sem::ComposeMode::Seq
                        : mode == "par"
                            ? mcnet::sem::ComposeMode::Par
                            : throw py::value_error("mode must be 'seq' or 'par'");
        auto r = mcnet::sem::check_compose(a, b, m_, tol);
        py::dict out;
        out["pass"] = r.pass;
        out["max_choi_distance"] = r.max_choi_dist;
        out["witness"] = r.witness;
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("mode"), py::arg("tol") = 1e-9);
}
