#include "mcnet/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>

namespace mcnet::report {

using json = nlohmann::ordered_json;
using qnum::Matrix;

namespace {

std::string fixed12(double v) {
  if (std::abs(v) < 5e-13) v = 0.0;  // avoid "-0.000000000000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

std::string sci3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

json complex_pair(const std::complex<double>& z) {
  return json::array({fixed12(z.real()), fixed12(z.imag())});
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_pair(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json state_json(const qnum::QRegisterState& s) {
  json out;
  out["ids"] = s.ids();
  out["density"] = matrix_json(s.density());
  return out;
}

json env_json(const calculus::Env& env) {
  json out = json::object();
  for (const auto& [k, v] : env) out[k] = v;  // std::map keeps keys sorted
  return out;
}

json id_set_json(const std::set<qnum::QubitId>& ids) {
  return json(std::vector<qnum::QubitId>(ids.begin(), ids.end()));
}

}  // namespace

std::string format_prob(double p) { return fixed12(p); }

std::string render_report(const net::Network& n, const sem::PTS& pts,
                          const std::string& schedule, const calculus::Env& cin,
                          const std::vector<qnum::QRegisterState>& qin) {
  json out;
  out["kind"] = "pts";
  out["schedule"] = schedule;
  {
    json in;
    in["classical"] = env_json(cin);
    json states = json::object();
    for (std::size_t i = 0; i < qin.size() && i < n.agents.size(); ++i) {
      if (qin[i].num_qubits() > 0) states[n.agents[i].name] = state_json(qin[i]);
    }
    in["quantum"] = std::move(states);
    out["inputs"] = std::move(in);
  }

  // deterministic class order: by classical outputs, then sorts
  std::vector<std::size_t> order(pts.classes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto key = [&](std::size_t i) {
    std::string k;
    for (std::size_t a = 0; a < pts.classes[i].first.couts.size(); ++a) {
      for (const auto& [name, v] : pts.classes[i].first.couts[a]) {
        k += name + std::to_string(v) + ";";
      }
      for (auto q : pts.classes[i].first.sorts[a]) k += std::to_string(q) + ",";
      k += "|";
    }
    return k;
  };
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

  json classes = json::array();
  for (std::size_t i : order) {
    const auto& [cls, prob] = pts.classes[i];
    json c;
    c["probability"] = fixed12(prob);
    json outs = json::object();
    json sorts = json::object();
    for (std::size_t a = 0; a < n.agents.size(); ++a) {
      outs[n.agents[a].name] = env_json(cls.couts[a]);
      sorts[n.agents[a].name] = id_set_json(cls.sorts[a]);
    }
    c["outputs"] = std::move(outs);
    c["sorts"] = std::move(sorts);
    c["state"] = state_json(cls.qfinal);
    classes.push_back(std::move(c));
  }
  out["classes"] = std::move(classes);

  if (!pts.paths.empty()) {
    json paths = json::array();
    for (const auto& p : pts.paths) {
      json pj;
      pj["lambda"] = fixed12(p.lambda);
      json steps = json::array();
      for (const auto& s : p.steps) steps.push_back(s.description);
      pj["steps"] = std::move(steps);
      paths.push_back(std::move(pj));
    }
    out["paths"] = std::move(paths);
  }
  return out.dump(2) + "\n";
}

std::string render_report(const sem::Denotation& d, bool include_elements,
                          bool include_choi) {
  json out;
  out["kind"] = "denotation";

  json type;
  json init = json::object();
  json fin = json::object();
  json inputs = json::object();
  for (std::size_t i = 0; i < d.agent_names.size(); ++i) {
    init[d.agent_names[i]] = id_set_json(d.initial_sorts[i]);
    fin[d.agent_names[i]] = id_set_json(d.final_sorts[i]);
    inputs[d.agent_names[i]] = d.inputs_by_agent[i];
  }
  type["initial_sorts"] = std::move(init);
  type["final_sorts"] = std::move(fin);
  type["quantum_inputs"] = std::move(inputs);
  out["type"] = std::move(type);
  out["input_ids"] = d.in_ids;
  out["output_ids"] = d.out_ids;
  out["classical_inputs"] =
      std::vector<std::string>(d.cin_names.begin(), d.cin_names.end());
  out["signal_outputs"] = std::vector<std::string>(d.signal_out_names.begin(),
                                                   d.signal_out_names.end());
  out["external_outputs"] = std::vector<std::string>(
      d.external_out_names.begin(), d.external_out_names.end());

  const double din = double(Eigen::Index(1) << d.in_ids.size());
  json table = json::array();
  for (const auto& entry : d.table) {
    json ej;
    ej["inputs"] = env_json(entry.cin);
    ej["external"] = env_json(entry.external_outs);
    json classes = json::array();
    for (const auto& g : entry.groups) {
      json gj;
      gj["outputs"] = env_json(g.outs);
      gj["elements"] = g.kraus.elements.size();
      double tr = 0.0;
      for (const auto& l : g.kraus.elements) tr += l.matrix.squaredNorm();
      gj["trace_probability"] = fixed12(tr / din);  // on the maximally mixed input
      if (include_elements) {
        json els = json::array();
        for (const auto& l : g.kraus.elements) els.push_back(matrix_json(l.matrix));
        gj["kraus"] = std::move(els);
      }
      if (include_choi) gj["choi"] = matrix_json(qnum::choi(g.kraus));
      classes.push_back(std::move(gj));
    }
    ej["classes"] = std::move(classes);
    table.push_back(std::move(ej));
  }
  out["table"] = std::move(table);
  return out.dump(2) + "\n";
}

std::string render_report(const sem::EquivResult& r, double tol) {
  json out;
  out["kind"] = "equivalence";
  out["equivalent"] = r.equivalent;
  out["tolerance"] = sci3(tol);
  out["max_choi_distance"] = sci3(r.max_choi_dist);
  out["witness"] = r.witness;
  return out.dump(2) + "\n";
}

std::string render_report(const sem::ScheduleCheck& r) {
  json out;
  out["kind"] = "schedules";
  out["pass"] = r.pass;
  out["interleavings"] = r.interleavings;
  out["truncated"] = r.truncated;
  out["witness"] = r.witness;
  return out.dump(2) + "\n";
}

std::string render_report(const sem::ContextCheck& r, double tol) {
  json out;
  out["kind"] = "context";
  out["pass"] = r.pass;
  out["max_deviation"] = sci3(r.max_deviation);
  out["tolerance"] = sci3(tol);
  out["trials"] = r.trials;
  out["extra_qubits"] = r.extra_qubits;
  out["seed"] = r.seed;
  return out.dump(2) + "\n";
}

std::string render_report(const sem::ComposeCheck& r, double tol) {
  json out;
  out["kind"] = "compose";
  out["pass"] = r.pass;
  out["max_choi_distance"] = sci3(r.max_choi_dist);
  out["tolerance"] = sci3(tol);
  out["witness"] = r.witness;
  return out.dump(2) + "\n";
}

std::string render_validation(const std::vector<dsl::ParseDiagnostic>& diagnostics) {
  json out;
  out["kind"] = "validation";
  bool ok = true;
  json list = json::array();
  for (const auto& d : diagnostics) {
    if (d.severity == dsl::Severity::Error) ok = false;
    json dj;
    dj["severity"] = d.severity == dsl::Severity::Error ? "error" : "warning";
    dj["message"] = d.message;
    dj["file"] = d.span.file;
    dj["line"] = d.span.line;
    dj["column"] = d.span.column;
    list.push_back(std::move(dj));
  }
  out["ok"] = ok;
  out["diagnostics"] = std::move(list);
  return out.dump(2) + "\n";
}

}  // namespace mcnet::report
