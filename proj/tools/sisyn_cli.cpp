// Command-line front end. Talks to the core library exclusively through the
// C interface in sisyn.h; report JSON is re-rendered here for human output.
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sisyn.h"

namespace {

constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

int report_failure(int rc) {
  std::fprintf(stderr, "error: %s\n", sisyn_last_error());
  return rc;
}

struct PatternHandle {
  sisyn_pattern* p = nullptr;
  ~PatternHandle() { sisyn_pattern_free(p); }
};

struct StringHandle {
  char* s = nullptr;
  ~StringHandle() { sisyn_string_free(s); }
};

struct BufferHandle {
  double* b = nullptr;
  ~BufferHandle() { sisyn_buffer_free(b); }
};

int load_pattern(const std::string& path, PatternHandle& out) {
  const int rc = sisyn_pattern_read_file(path.c_str(), &out.p);
  return rc ? report_failure(rc) : 0;
}

int print_pattern(const sisyn_pattern* p) {
  StringHandle text;
  const int rc = sisyn_pattern_format(p, &text.s);
  if (rc) return report_failure(rc);
  std::fputs(text.s, stdout);
  return 0;
}

void print_matrix(const double* data, int rows, int cols) {
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j)
      std::printf("%s%.17g", j ? " " : "", data[i * cols + j]);
    std::printf("\n");
  }
}

int cmd_algo1(const std::string& t_path) {
  PatternHandle t, r;
  if (int rc = load_pattern(t_path, t)) return rc;
  const int rc = sisyn_r_star(t.p, &r.p);
  if (rc) return report_failure(rc);
  return print_pattern(r.p);
}

int cmd_si_check(const std::string& t_path, const std::string& r_path, const std::string& s_path) {
  PatternHandle t, r, s;
  if (int rc = load_pattern(t_path, t)) return rc;
  if (int rc = load_pattern(r_path, r)) return rc;
  if (int rc = load_pattern(s_path, s)) return rc;
  int holds = 0;
  int triple[3];
  const int rc = sisyn_si_check(t.p, r.p, s.p, &holds, triple);
  if (rc) return report_failure(rc);
  if (holds) {
    std::printf("SI: true\n");
    return 0;
  }
  std::printf("SI: false (violating triple %d,%d,%d)\n", triple[0], triple[1], triple[2]);
  return 2;
}

int cmd_qi_check(const std::string& s_path, const std::string& d_path) {
  PatternHandle s, d;
  if (int rc = load_pattern(s_path, s)) return rc;
  if (int rc = load_pattern(d_path, d)) return rc;
  int holds = 0;
  const int rc = sisyn_qi_check(s.p, d.p, &holds);
  if (rc) return report_failure(rc);
  std::printf("QI: %s\n", holds ? "true" : "false");
  return holds ? 0 : 2;
}

int cmd_superset(const std::string& s_path, const std::string& d_path) {
  PatternHandle s, d, out;
  if (int rc = load_pattern(s_path, s)) return rc;
  if (int rc = load_pattern(d_path, d)) return rc;
  const int rc = sisyn_qi_superset(s.p, d.p, &out.p);
  if (rc) return report_failure(rc);
  return print_pattern(out.p);
}

int cmd_subset(const std::string& s_path, const std::string& d_path, int max_dist) {
  PatternHandle s, d;
  if (int rc = load_pattern(s_path, s)) return rc;
  if (int rc = load_pattern(d_path, d)) return rc;
  sisyn_pattern** list = nullptr;
  size_t count = 0;
  const int rc = sisyn_qi_subsets(s.p, d.p, max_dist, 0, &list, &count);
  if (rc) return report_failure(rc);
  if (count == 0) {
    std::printf("no QI subset within distance %d\n", max_dist);
    return 2;
  }
  int prc = 0;
  for (size_t i = 0; i < count && prc == 0; ++i) {
    if (i) std::printf("---\n");
    prc = print_pattern(list[i]);
  }
  sisyn_pattern_list_free(list, count);
  return prc;
}

int cmd_witness_inverse(const std::string& r_path, std::uint64_t seed) {
  PatternHandle r;
  if (int rc = load_pattern(r_path, r)) return rc;
  BufferHandle x;
  int n = 0;
  const int rc = sisyn_witness_inverse(r.p, seed, &x.b, &n);
  if (rc) return report_failure(rc);
  print_matrix(x.b, n, n);
  return 0;
}

int cmd_witness_counterexample(const std::string& t_path, const std::string& r_path,
                               const std::string& s_path, std::uint64_t seed) {
  PatternHandle t, r, s;
  if (int rc = load_pattern(t_path, t)) return rc;
  if (int rc = load_pattern(r_path, r)) return rc;
  if (int rc = load_pattern(s_path, s)) return rc;
  BufferHandle y, x;
  int m = 0, p = 0;
  const int rc = sisyn_witness_counterexample(t.p, r.p, s.p, seed, &y.b, &x.b, &m, &p);
  if (rc) return report_failure(rc);
  std::printf("Y:\n");
  print_matrix(y.b, m, p);
  std::printf("X:\n");
  print_matrix(x.b, p, p);
  return 0;
}

void print_synth_human(const nlohmann::json& rep) {
  const bool feasible = rep.at("feasible").get<bool>();
  std::printf("feasible: %s\n", feasible ? "true" : "false");
  std::printf("N: %d\n", rep.at("N").get<int>());
  if (!feasible) {
    std::printf("feas_residual: %.6e\n", rep.at("feas_residual").get<double>());
    return;
  }
  std::printf("cost_h2: %.6f\n", rep.at("cost_h2").get<double>());
  std::printf("cost_h2_sq: %.6f\n", rep.at("cost_h2_sq").get<double>());
  std::printf("verified: %s\n", rep.at("verified").get<bool>() ? "true" : "false");
  const auto& checks = rep.at("checks");
  std::printf("checks:\n");
  std::printf("  constraint_residual: %.6e\n", checks.at("constraint_residual").get<double>());
  std::printf("  controller_sparsity_ok: %s\n",
              checks.at("controller_sparsity_ok").get<bool>() ? "true" : "false");
  std::printf("  closed_loop_stable: %s\n",
              checks.at("closed_loop_stable").get<bool>() ? "true" : "false");
  std::printf("  closed_loop_radius: %.6f\n", checks.at("closed_loop_radius").get<double>());
  std::printf("  lyap_vs_fir_cost_gap: %.6e\n", checks.at("lyap_vs_fir_cost_gap").get<double>());
  std::printf("  objective_vs_fir_gap: %.6e\n", checks.at("objective_vs_fir_gap").get<double>());
  const auto& k = rep.at("K_fir");
  const int rows = static_cast<int>(k.at(0).size());
  const int cols = static_cast<int>(k.at(0).at(0).size());
  std::printf("K_fir: %zu coefficients, %d x %d\n", k.size(), rows, cols);
}

int cmd_synth(const std::string& path, bool as_json) {
  StringHandle report;
  const int rc = sisyn_synth_file(path.c_str(), &report.s);
  if (!report.s) return report_failure(rc);
  if (as_json) {
    std::printf("%s\n", report.s);
    return rc;
  }
  print_synth_human(nlohmann::json::parse(report.s));
  return rc;
}

int cmd_sweep(const std::string& path, const std::vector<int>& horizons) {
  std::string problem;
  {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) {
      std::fprintf(stderr, "error: cannot open \"%s\"\n", path.c_str());
      return 3;
    }
    char buf[4096];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) problem.append(buf, got);
    std::fclose(f);
  }
  StringHandle table;
  const int rc = sisyn_sweep_json(problem.c_str(), horizons.data(), horizons.size(), &table.s);
  if (rc) return report_failure(rc);
  const nlohmann::json rows = nlohmann::json::parse(table.s).at("rows");
  for (const auto& row : rows) {
    if (row.at("feasible").get<bool>()) {
      std::printf("N=%d feasible cost_h2=%.6f", row.at("N").get<int>(),
                  row.at("cost_h2").get<double>());
      if (row.contains("delta"))
        std::printf(" delta=%.3e\n", row.at("delta").get<double>());
      else
        std::printf(" delta=-\n");
    } else {
      std::printf("N=%d infeasible\n", row.at("N").get<int>());
    }
  }
  return 0;
}

int cmd_repro_example1(const std::string& variant) {
  StringHandle report;
  const int rc = sisyn_repro_example1(variant.c_str(), &report.s);
  if (!report.s) return report_failure(rc);
  const nlohmann::json rep = nlohmann::json::parse(report.s);
  for (const auto& row : rep.at("rows")) {
    if (row.at("feasible").get<bool>()) {
      std::printf("N=%d cost_h2=%.6f", row.at("N").get<int>(), row.at("cost_h2").get<double>());
      if (row.contains("delta"))
        std::printf(" delta=%.3e\n", row.at("delta").get<double>());
      else
        std::printf(" delta=-\n");
    } else {
      std::printf("N=%d infeasible residual=%.3e\n", row.at("N").get<int>(),
                  row.at("feas_residual").get<double>());
    }
  }
  const bool ok = rep.at("ok").get<bool>();
  if (variant == "qi-subset") {
    std::printf(ok ? "infeasible\n" : "FAIL: %s\n", rep.at("message").get<std::string>().c_str());
  } else if (ok) {
    std::printf("final cost_h2: %.6f\nok: %s\n", rep.at("final_cost").get<double>(),
                rep.at("message").get<std::string>().c_str());
  } else {
    std::printf("FAIL: %s\n", rep.at("message").get<std::string>().c_str());
  }
  return rc;
}

int cmd_repro_lqr(int size, std::uint64_t seed) {
  StringHandle report;
  const int rc = sisyn_repro_lqr(size, seed, &report.s);
  if (!report.s) return report_failure(rc);
  const nlohmann::json rep = nlohmann::json::parse(report.s);
  std::printf("n=%d seed=%" PRIu64 "\n", rep.at("size").get<int>(),
              rep.at("seed").get<std::uint64_t>());
  if (rep.at("feasible").get<bool>()) {
    std::printf("cost_sq=%.6f (target %d)\n", rep.at("cost_sq").get<double>(),
                rep.at("size").get<int>());
    std::printf("max|K0 + A|=%.3e\nmax|K[t>=1]|=%.3e\n", rep.at("k0_error").get<double>(),
                rep.at("k_tail_error").get<double>());
  }
  std::printf(rep.at("ok").get<bool>() ? "ok\n" : "FAIL: %s\n",
              rep.at("message").get<std::string>().c_str());
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparsity-invariance toolkit: pattern analysis, witnesses, H2 synthesis"};
  app.require_subcommand(1);
  int rc = 0;

  // pattern
  auto* pattern = app.add_subcommand("pattern", "Boolean pattern analysis");
  pattern->require_subcommand(1);
  {
    static std::string t_path, r_path, s_path, d_path;
    static int max_dist = 0;

    auto* algo1 = pattern->add_subcommand("algo1", "Maximal R for a pattern T (Algorithm 1)");
    algo1->add_option("T", t_path, "T pattern file")->required();
    algo1->callback([&] { rc = cmd_algo1(t_path); });

    auto* si = pattern->add_subcommand("si-check", "Sparsity-invariance test for (T, R, S)");
    si->add_option("T", t_path, "T pattern file")->required();
    si->add_option("R", r_path, "R pattern file")->required();
    si->add_option("S", s_path, "S pattern file")->required();
    si->callback([&] { rc = cmd_si_check(t_path, r_path, s_path); });

    auto* qi = pattern->add_subcommand("qi-check", "Quadratic-invariance test for (S, Delta)");
    qi->add_option("S", s_path, "S pattern file")->required();
    qi->add_option("Delta", d_path, "plant pattern file")->required();
    qi->callback([&] { rc = cmd_qi_check(s_path, d_path); });

    auto* sup = pattern->add_subcommand("superset", "Least QI superset of S");
    sup->add_option("S", s_path, "S pattern file")->required();
    sup->add_option("Delta", d_path, "plant pattern file")->required();
    sup->callback([&] { rc = cmd_superset(s_path, d_path); });

    auto* sub = pattern->add_subcommand("subset", "Nearest QI subsets of S");
    sub->add_option("S", s_path, "S pattern file")->required();
    sub->add_option("Delta", d_path, "plant pattern file")->required();
    sub->add_option("--max-dist", max_dist, "largest removal count to search")->required();
    sub->callback([&] { rc = cmd_subset(s_path, d_path, max_dist); });
  }

  // witness
  auto* witness = app.add_subcommand("witness", "Constructive witnesses");
  witness->require_subcommand(1);
  {
    static std::string t_path, r_path, s_path;
    static std::uint64_t seed = kDefaultSeed;

    auto* inv = witness->add_subcommand("inverse", "Invertible X with Struct(X^-1) = R^(p-1)");
    inv->add_option("R", r_path, "R pattern file")->required();
    inv->add_option("--seed", seed, "RNG seed");
    inv->callback([&] { rc = cmd_witness_inverse(r_path, seed); });

    auto* cex = witness->add_subcommand("counterexample",
                                        "(Y, X) violating S when the SI test fails");
    cex->add_option("T", t_path, "T pattern file")->required();
    cex->add_option("R", r_path, "R pattern file")->required();
    cex->add_option("S", s_path, "S pattern file")->required();
    cex->add_option("--seed", seed, "RNG seed");
    cex->callback([&] { rc = cmd_witness_counterexample(t_path, r_path, s_path, seed); });
  }

  // synth
  {
    static std::string problem_path;
    static bool as_json = false;
    auto* synth = app.add_subcommand("synth", "Solve one synthesis problem");
    synth->add_option("problem", problem_path, "problem JSON file")->required();
    synth->add_flag("--json", as_json, "emit the canonical report JSON");
    synth->callback([&] { rc = cmd_synth(problem_path, as_json); });
  }

  // sweep
  {
    static std::string problem_path;
    static std::vector<int> horizons;
    auto* sweep = app.add_subcommand("sweep", "Horizon sweep over one problem");
    sweep->add_option("problem", problem_path, "problem JSON file")->required();
    sweep->add_option("--horizons", horizons, "comma-separated horizon list")
        ->required()
        ->delimiter(',');
    sweep->callback([&] { rc = cmd_sweep(problem_path, horizons); });
  }

  // repro
  auto* repro = app.add_subcommand("repro", "One-shot reproduction runs");
  repro->require_subcommand(1);
  {
    static std::string variant = "si";
    static int size = 0;
    static std::uint64_t seed = kDefaultSeed;

    auto* ex1 = repro->add_subcommand("example1", "Discrete-time example1 experiment");
    ex1->add_option("--variant", variant, "si | qi-subset | superset")
        ->check(CLI::IsMember({"si", "qi-subset", "superset"}));
    ex1->callback([&] { rc = cmd_repro_example1(variant); });

    auto* lqr = repro->add_subcommand("lqr", "Sparse LQR with K = -A optimum");
    lqr->add_option("--size", size, "state dimension")->required();
    lqr->add_option("--seed", seed, "RNG seed for the A matrix");
    lqr->callback([&] { rc = cmd_repro_lqr(size, seed); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }
  return rc;
}
