#include "sisyn/problem_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

#include "sisyn/builtin.hpp"
#include "sisyn/invariance.hpp"

namespace sisyn {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("problem: " + msg); }

Eigen::MatrixXd parse_matrix(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) fail(name + " must be a nonempty array of rows");
  const auto& first = j.front();
  if (!first.is_array() || first.empty()) fail(name + " rows must be nonempty arrays");
  Eigen::MatrixXd m(j.size(), first.size());
  for (int i = 0; i < static_cast<int>(j.size()); ++i) {
    const auto& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != m.cols()) fail(name + " is ragged");
    for (int k = 0; k < m.cols(); ++k) {
      if (!row[k].is_number()) fail(name + " has a non-numeric entry");
      m(i, k) = row[k].get<double>();
    }
  }
  return m;
}

Pattern pattern_from_inline(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) fail(name + " must be a path or inline rows");
  if (j.front().is_string()) {
    std::vector<std::string> rows;
    for (const auto& r : j) {
      if (!r.is_string()) fail(name + " mixes strings and arrays");
      rows.push_back(r.get<std::string>());
    }
    return Pattern::from_rows(rows);
  }
  const Eigen::MatrixXd m = parse_matrix(j, name);
  Pattern p(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < p.rows(); ++i)
    for (int k = 0; k < p.cols(); ++k) {
      const double v = m(i, k);
      if (v != 0.0 && v != 1.0) fail(name + " entries must be 0 or 1");
      p.set(i, k, v != 0.0);
    }
  return p;
}

Pattern parse_pattern_field(const json& j, const std::string& name) {
  if (j.is_string()) return read_pattern_file(j.get<std::string>());
  return pattern_from_inline(j, name);
}

FirSeries parse_series(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) fail(name + " must be an array of coefficient matrices");
  std::vector<Eigen::MatrixXd> coeffs;
  for (const auto& c : j) coeffs.push_back(parse_matrix(c, name + " coefficient"));
  for (const auto& c : coeffs)
    if (c.rows() != coeffs.front().rows() || c.cols() != coeffs.front().cols())
      fail(name + " coefficients disagree in size");
  return FirSeries(std::move(coeffs));
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json series_to_json(const FirSeries& f) {
  json out = json::array();
  for (int t = 0; t <= f.horizon(); ++t) out.push_back(matrix_to_json(f.coeff(t)));
  return out;
}

json round12(const json& j) {
  if (j.is_object()) {
    json o = json::object();
    for (const auto& [k, v] : j.items()) o[k] = round12(v);
    return o;
  }
  if (j.is_array()) {
    json a = json::array();
    for (const auto& v : j) a.push_back(round12(v));
    return a;
  }
  if (j.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", j.get<double>());
    return json(std::strtod(buf, nullptr));
  }
  return j;
}

}  // namespace

SynthesisSpec parse_problem_json(const json& j) {
  if (!j.is_object()) fail("top level must be a JSON object");
  static const std::set<std::string> known{"plant", "A",     "A_bin",    "S",
                                          "T",     "R",     "N",        "gamma",
                                          "cost",  "tol_feas", "struct_tol", "stability_margin"};
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (!known.count(k)) fail("unknown key \"" + k + "\"");
  }

  SynthesisSpec spec;
  if (!j.contains("plant")) fail("missing \"plant\"");
  const json& jp = j.at("plant");
  std::string kind = "custom";
  Eigen::MatrixXd lqr_a;
  if (jp.is_string()) {
    kind = jp.get<std::string>();
    if (kind == "example1") {
      spec.plant = example1_plant();
    } else if (kind == "lqr") {
      if (!j.contains("A")) fail("plant \"lqr\" requires an \"A\" block");
      lqr_a = parse_matrix(j.at("A"), "A");
      spec.plant = lqr_plant(lqr_a);
    } else {
      fail("unknown plant \"" + kind + "\"");
    }
  } else if (jp.is_object()) {
    if (!jp.contains("A") || !jp.contains("B") || !jp.contains("C"))
      fail("custom plant requires A, B, C");
    spec.plant = StateSpace{parse_matrix(jp.at("A"), "plant.A"), parse_matrix(jp.at("B"), "plant.B"),
                            parse_matrix(jp.at("C"), "plant.C")};
  } else {
    fail("\"plant\" must be a name or an {A, B, C} object");
  }
  if (kind != "lqr" && (j.contains("A") || j.contains("A_bin")))
    fail("\"A\"/\"A_bin\" apply to plant \"lqr\" only");

  if (!j.contains("N") || !j.at("N").is_number_integer()) fail("\"N\" must be an integer");
  spec.horizon = j.at("N").get<int>();

  if (j.contains("gamma")) {
    const std::string g = j.at("gamma").get<std::string>();
    if (g == "identity")
      spec.gamma = Gamma::Identity;
    else if (g == "plant")
      spec.gamma = Gamma::Plant;
    else
      fail("\"gamma\" must be \"identity\" or \"plant\"");
  }

  if (j.contains("S"))
    spec.s = parse_pattern_field(j.at("S"), "S");
  else if (kind == "example1")
    spec.s = example1_s();
  else if (kind == "lqr")
    spec.s = j.contains("A_bin") ? parse_pattern_field(j.at("A_bin"), "A_bin") : struct_of(lqr_a);
  else
    fail("missing \"S\"");

  spec.t = j.contains("T") ? parse_pattern_field(j.at("T"), "T") : spec.s;

  const int p = spec.plant.outputs();
  spec.r = Pattern::identity(p);
  if (!j.contains("R") || (j.at("R").is_string() && j.at("R").get<std::string>() == "auto")) {
    spec.r = r_star(spec.t);
  } else if (j.at("R").is_string() && j.at("R").get<std::string>() == "none") {
    spec.impose_r_structure = false;
  } else {
    spec.r = parse_pattern_field(j.at("R"), "R");
  }

  if (!j.contains("cost")) {
    spec.cost = kind == "lqr" ? CostSpec::state_feedback_w() : CostSpec::example1_blocks();
  } else if (j.at("cost").is_string()) {
    const std::string c = j.at("cost").get<std::string>();
    if (c == "example1_blocks")
      spec.cost = CostSpec::example1_blocks();
    else if (c == "state_feedback_w")
      spec.cost = CostSpec::state_feedback_w();
    else
      fail("unknown cost \"" + c + "\"");
  } else if (j.at("cost").is_object()) {
    const json& jc = j.at("cost");
    if (!jc.contains("P11") || !jc.contains("P12") || !jc.contains("P21"))
      fail("generic cost requires P11, P12, P21");
    spec.cost = CostSpec::generic(parse_series(jc.at("P11"), "P11"), parse_series(jc.at("P12"), "P12"),
                                  parse_series(jc.at("P21"), "P21"));
  } else {
    fail("\"cost\" must be a name or a {P11, P12, P21} object");
  }

  if (j.contains("tol_feas")) spec.tol_feas = j.at("tol_feas").get<double>();
  if (j.contains("struct_tol")) spec.struct_tol = j.at("struct_tol").get<double>();
  if (j.contains("stability_margin")) spec.stability_margin = j.at("stability_margin").get<double>();

  finalize_spec(spec);
  return spec;
}

SynthesisSpec parse_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open \"" + path + "\"");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail(std::string("JSON parse error: ") + e.what());
  }
  return parse_problem_json(j);
}

json report_to_json(const SynthesisResult& r) {
  json out;
  out["feasible"] = r.feasible;
  out["N"] = r.horizon;
  if (!r.feasible) {
    out["feas_residual"] = r.feas_residual;
    return out;
  }
  out["cost_h2"] = r.cost_h2;
  out["cost_h2_sq"] = r.cost_h2_sq;
  out["K_fir"] = series_to_json(r.k_fir);
  out["verified"] = r.verified;
  out["checks"] = json{{"constraint_residual", r.checks.constraint_residual},
                       {"controller_sparsity_ok", r.checks.controller_sparsity_ok},
                       {"closed_loop_stable", r.checks.closed_loop_stable},
                       {"closed_loop_radius", r.checks.closed_loop_radius},
                       {"lyap_vs_fir_cost_gap", r.checks.lyap_vs_fir_cost_gap},
                       {"objective_vs_fir_gap", r.checks.objective_vs_fir_gap}};
  return out;
}

json sweep_to_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json row;
    row["N"] = r.horizon;
    row["feasible"] = r.feasible;
    if (r.feasible) {
      row["cost_h2"] = r.cost_h2;
      if (r.delta >= 0.0) row["delta"] = r.delta;
    }
    arr.push_back(std::move(row));
  }
  return json{{"rows", std::move(arr)}};
}

std::string canonical_dump(const json& j) { return round12(j).dump(); }

}  // namespace sisyn
