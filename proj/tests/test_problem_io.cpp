#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "sisyn/builtin.hpp"
#include "sisyn/invariance.hpp"
#include "sisyn/problem_io.hpp"

using namespace sisyn;
using nlohmann::json;

namespace {

json parse(const char* text) { return json::parse(text); }

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  std::filesystem::path path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_SUITE_BEGIN("problem_io");

TEST_CASE("example1 defaults: T = S, R = r_star(T)") {
  SynthesisSpec spec = parse_problem_json(parse(R"({"plant": "example1", "N": 4})"));
  CHECK(spec.s == example1_s());
  CHECK(spec.t == example1_s());
  CHECK(spec.r == r_star(example1_s()));
  CHECK(spec.horizon == 4);
  CHECK(spec.gamma == Gamma::Identity);
  CHECK(spec.cost.kind == CostSpec::Kind::Example1Blocks);
  CHECK(spec.impose_r_structure);
  CHECK(spec.plant.states() == 5);
  CHECK(spec.plant.A(1, 1) == 2.0);
}

TEST_CASE("lqr plant pulls S from the structure of A") {
  SynthesisSpec spec = parse_problem_json(
      parse(R"({"plant": "lqr", "A": [[0, 1], [1, 0]], "N": 3, "gamma": "plant"})"));
  CHECK(spec.s == Pattern::from_rows({"01", "10"}));
  CHECK(spec.cost.kind == CostSpec::Kind::StateFeedbackW);
  CHECK(spec.gamma == Gamma::Plant);
  CHECK(spec.plant.A(0, 1) == 1.0);

  // A_bin overrides the derived pattern without touching the numerics.
  spec = parse_problem_json(
      parse(R"({"plant": "lqr", "A": [[0, 1], [1, 0]], "A_bin": ["11", "11"], "N": 3})"));
  CHECK(spec.s == Pattern::ones(2, 2));
  CHECK(spec.plant.A(0, 0) == 0.0);
}

TEST_CASE("R field variants") {
  const char* base = R"({"plant": "example1", "N": 4, "R": "auto"})";
  SynthesisSpec spec = parse_problem_json(parse(base));
  CHECK(spec.r == r_star(example1_s()));
  CHECK(spec.impose_r_structure);

  json j = parse(base);
  j["R"] = "none";
  spec = parse_problem_json(j);
  CHECK_FALSE(spec.impose_r_structure);
  CHECK(spec.r == Pattern::identity(5));

  j["R"] = json::parse(R"(["10000", "01000", "01100", "01110", "01111"])");
  spec = parse_problem_json(j);
  CHECK(spec.r == r_star(example1_s()));

  // Numeric 0/1 rows are accepted too.
  j = parse(R"({"plant": "lqr", "A": [[0, 1], [1, 0]], "N": 2,
                "R": [[1, 0], [0, 1]]})");
  spec = parse_problem_json(j);
  CHECK(spec.r == Pattern::identity(2));
}

TEST_CASE("pattern fields accept .pat paths") {
  auto path = temp_file("sisyn_io_s.pat", "1 0 0 0 0\n1 1 0 0 0\n0 1 1 0 0\n0 1 1 1 0\n0 1 1 1 1\n");
  json j = parse(R"({"plant": "example1", "N": 4})");
  j["S"] = path.string();
  SynthesisSpec spec = parse_problem_json(j);
  CHECK(spec.s == example1_s());
  std::filesystem::remove(path);
}

TEST_CASE("custom plant with a generic cost") {
  SynthesisSpec spec = parse_problem_json(parse(R"({
    "plant": {"A": [[0]], "B": [[0, 0]], "C": [[0], [0]]},
    "S": ["10", "11"],
    "N": 2,
    "cost": {"P11": [[[1, 0], [0, 1]]], "P12": [[[1, 0], [0, 1]]], "P21": [[[1, 0], [0, 1]]]}
  })"));
  CHECK(spec.plant.inputs() == 2);
  CHECK(spec.plant.outputs() == 2);
  CHECK(spec.cost.kind == CostSpec::Kind::GenericFir);
  CHECK(spec.cost.p11.horizon() == 0);
  CHECK(spec.t == Pattern::from_rows({"10", "11"}));
}

TEST_CASE("schema violations are rejected") {
  auto bad = [](const char* text) {
    CHECK_THROWS_AS(parse_problem_json(json::parse(text)), std::invalid_argument);
  };
  bad(R"({"N": 4})");                                             // no plant
  bad(R"({"plant": "example1"})");                                // no N
  bad(R"({"plant": "example1", "N": 4.5})");                      // non-integer N
  bad(R"({"plant": "example1", "N": 0})");                        // horizon < 1
  bad(R"({"plant": "nope", "N": 4})");                            // unknown plant
  bad(R"({"plant": "example1", "N": 4, "extra": 1})");            // unknown key
  bad(R"({"plant": "example1", "N": 4, "A": [[1]]})");            // A without lqr
  bad(R"({"plant": "lqr", "N": 4})");                             // lqr without A
  bad(R"({"plant": {"A": [[0]], "B": [[1]]}, "N": 4})");          // missing C
  bad(R"({"plant": "example1", "N": 4, "gamma": "left"})");       // bad gamma
  bad(R"({"plant": "example1", "N": 4, "cost": "quadratic"})");   // bad cost name
  bad(R"({"plant": "example1", "N": 4, "S": [[1, 0.5]]})");       // non-binary entry
  bad(R"({"plant": "example1", "N": 4, "S": [[1, 0], [1]]})");    // ragged
  bad(R"({"plant": "example1", "N": 4, "S": ["10", [1, 0]]})");   // mixed rows
  bad(R"({"plant": "example1", "N": 4, "T": ["11111", "11111", "11111", "11111", "11111"]})");
}

TEST_CASE("invariance failures surface through the parser") {
  json j = parse(R"({"plant": "example1", "N": 4})");
  j["R"] = json::array({"11111", "11111", "11111", "11111", "11111"});
  bool threw = false;
  try {
    parse_problem_json(j);
  } catch (const std::invalid_argument& e) {
    threw = true;
    CHECK(std::string(e.what()).find("violating triple") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("parse_problem_file") {
  auto path = temp_file("sisyn_io_problem.json", R"({"plant": "example1", "N": 6})");
  SynthesisSpec spec = parse_problem_file(path.string());
  CHECK(spec.horizon == 6);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(parse_problem_file("/nonexistent/sisyn.json"), std::invalid_argument);

  auto broken = temp_file("sisyn_io_broken.json", "{\"plant\": ");
  CHECK_THROWS_AS(parse_problem_file(broken.string()), std::invalid_argument);
  std::filesystem::remove(broken);
}

TEST_CASE("report_to_json schema") {
  SynthesisResult r;
  r.feasible = true;
  r.verified = true;
  r.horizon = 2;
  r.cost_h2 = 3.0;
  r.cost_h2_sq = 9.0;
  r.k_fir = FirSeries(1, 1, 1);
  r.k_fir.coeff(0)(0, 0) = 2.5;
  r.k_fir.coeff(1)(0, 0) = -1.0;
  r.checks.constraint_residual = 1e-12;
  r.checks.controller_sparsity_ok = true;
  r.checks.closed_loop_stable = true;
  r.checks.closed_loop_radius = 0.5;
  r.checks.lyap_vs_fir_cost_gap = 1e-10;
  r.checks.objective_vs_fir_gap = 1e-11;

  json out = report_to_json(r);
  CHECK(out.at("feasible") == true);
  CHECK(out.at("N") == 2);
  CHECK(out.at("cost_h2") == 3.0);
  CHECK(out.at("cost_h2_sq") == 9.0);
  CHECK(out.at("verified") == true);
  CHECK(out.at("K_fir") == json::parse("[[[2.5]], [[-1.0]]]"));
  CHECK(out.at("checks").at("closed_loop_radius") == 0.5);
  CHECK(out.at("checks").size() == 6);

  SynthesisResult inf;
  inf.feasible = false;
  inf.horizon = 5;
  inf.feas_residual = 0.25;
  json jinf = report_to_json(inf);
  CHECK(jinf.at("feasible") == false);
  CHECK(jinf.at("feas_residual") == 0.25);
  CHECK_FALSE(jinf.contains("K_fir"));
  CHECK_FALSE(jinf.contains("cost_h2"));
  CHECK(jinf.size() == 3);
}

TEST_CASE("sweep_to_json keeps deltas only after the first feasible row") {
  std::vector<SweepRow> rows(3);
  rows[0] = {4, true, 7.0, -1.0};
  rows[1] = {8, true, 6.5, 0.5};
  rows[2] = {12, false, 0.0, -1.0};
  json out = sweep_to_json(rows);
  const json& arr = out.at("rows");
  REQUIRE(arr.size() == 3);
  CHECK_FALSE(arr[0].contains("delta"));
  CHECK(arr[0].at("cost_h2") == 7.0);
  CHECK(arr[1].at("delta") == 0.5);
  CHECK(arr[2].at("feasible") == false);
  CHECK_FALSE(arr[2].contains("cost_h2"));
}

TEST_CASE("canonical_dump sorts keys and rounds to 12 significant digits") {
  json a;
  a["beta"] = 1.0 / 3.0;
  a["alpha"] = 2.0;
  json b;
  b["alpha"] = 2.0;
  b["beta"] = 0.333333333333;  // pre-rounded
  CHECK(canonical_dump(a) == canonical_dump(b));
  CHECK(canonical_dump(a) == R"({"alpha":2.0,"beta":0.333333333333})");

  CHECK(canonical_dump(json{{"x", 1.0 + 1e-13}}) == R"({"x":1.0})");
  CHECK(canonical_dump(json{{"n", 7}}) == R"({"n":7})");

  // Nested structures round too.
  json nested{{"v", json::array({1.0 / 7.0})}};
  CHECK(canonical_dump(nested) == R"({"v":[0.142857142857]})");
}

TEST_SUITE_END();
