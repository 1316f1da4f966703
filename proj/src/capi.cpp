#include "sisyn.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "sisyn/invariance.hpp"
#include "sisyn/pattern.hpp"
#include "sisyn/problem_io.hpp"
#include "sisyn/repro.hpp"
#include "sisyn/witness.hpp"

struct sisyn_pattern {
  sisyn::Pattern p;
};

namespace {

thread_local std::string g_last_error = "no error";

void set_error(const std::string& msg) { g_last_error = msg; }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

double* dup_matrix(const Eigen::MatrixXd& m) {
  double* out = static_cast<double*>(std::malloc(sizeof(double) * m.size()));
  if (!out) throw std::bad_alloc();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
  return out;
}

/// Runs fn, translating exceptions to status codes. fn may return a status
/// itself (used where a report accompanies a nonzero status).
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return SISYN_INVALID;
  } catch (const std::exception& e) {
    set_error(e.what());
    return SISYN_NUMERIC;
  }
}

int require(bool cond, const char* msg) {
  if (!cond) {
    set_error(msg);
    return SISYN_INVALID;
  }
  return SISYN_OK;
}

std::uint64_t subset_budget(std::uint64_t requested) {
  if (requested != 0) return requested;
  if (const char* env = std::getenv("SI_SYNTH_MAX_SUBSET_CANDIDATES")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return 1000000ull;
}

nlohmann::json example1_repro_json(const sisyn::Example1Repro& rep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    nlohmann::json row;
    row["N"] = r.horizon;
    row["feasible"] = r.feasible;
    if (r.feasible) {
      row["cost_h2"] = r.cost_h2;
      if (r.delta >= 0.0) row["delta"] = r.delta;
    } else {
      row["feas_residual"] = r.feas_residual;
    }
    rows.push_back(std::move(row));
  }
  nlohmann::json out;
  out["variant"] = rep.variant;
  out["ok"] = rep.ok;
  out["rows"] = std::move(rows);
  if (rep.variant != "qi-subset") out["final_cost"] = rep.final_cost;
  out["message"] = rep.message;
  return out;
}

nlohmann::json lqr_repro_json(const sisyn::LqrRepro& rep) {
  nlohmann::json out;
  out["size"] = rep.size;
  out["seed"] = rep.seed;
  out["ok"] = rep.ok;
  out["feasible"] = rep.feasible;
  if (rep.feasible) {
    out["cost_sq"] = rep.cost_sq;
    out["k0_error"] = rep.k0_error;
    out["k_tail_error"] = rep.k_tail_error;
  }
  out["message"] = rep.message;
  return out;
}

int synth_status(const sisyn::SynthesisResult& res) {
  if (!res.feasible) {
    set_error("program infeasible");
    return SISYN_INFEASIBLE;
  }
  if (!res.verified) {
    set_error("solution failed verification checks");
    return SISYN_NUMERIC;
  }
  return SISYN_OK;
}

}  // namespace

extern "C" {

const char* sisyn_last_error(void) { return g_last_error.c_str(); }

void sisyn_string_free(char* s) { std::free(s); }

void sisyn_buffer_free(double* buf) { std::free(buf); }

int sisyn_pattern_create(int rows, int cols, const uint8_t* row_major, sisyn_pattern** out) {
  if (int rc = require(row_major && out, "pattern_create: NULL argument")) return rc;
  return guarded([&] {
    if (rows < 1 || cols < 1) throw std::invalid_argument("pattern_create: empty dimensions");
    sisyn::Pattern p(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) p.set(i, j, row_major[i * cols + j] != 0);
    *out = new sisyn_pattern{std::move(p)};
    return SISYN_OK;
  });
}

int sisyn_pattern_parse(const char* text, sisyn_pattern** out) {
  if (int rc = require(text && out, "pattern_parse: NULL argument")) return rc;
  return guarded([&] {
    *out = new sisyn_pattern{sisyn::parse_pattern(text)};
    return SISYN_OK;
  });
}

int sisyn_pattern_read_file(const char* path, sisyn_pattern** out) {
  if (int rc = require(path && out, "pattern_read_file: NULL argument")) return rc;
  return guarded([&] {
    try {
      *out = new sisyn_pattern{sisyn::read_pattern_file(path)};
    } catch (const std::runtime_error& e) {
      // I/O failures are bad input, not numerical breakdown.
      throw std::invalid_argument(e.what());
    }
    return SISYN_OK;
  });
}

int sisyn_pattern_write_file(const sisyn_pattern* pat, const char* path) {
  if (int rc = require(pat && path, "pattern_write_file: NULL argument")) return rc;
  return guarded([&] {
    try {
      sisyn::write_pattern_file(pat->p, path);
    } catch (const std::runtime_error& e) {
      throw std::invalid_argument(e.what());
    }
    return SISYN_OK;
  });
}

int sisyn_pattern_format(const sisyn_pattern* pat, char** out_text) {
  if (int rc = require(pat && out_text, "pattern_format: NULL argument")) return rc;
  return guarded([&] {
    *out_text = dup_string(sisyn::to_text(pat->p));
    return SISYN_OK;
  });
}

int sisyn_pattern_dims(const sisyn_pattern* pat, int* rows, int* cols) {
  if (int rc = require(pat && rows && cols, "pattern_dims: NULL argument")) return rc;
  *rows = pat->p.rows();
  *cols = pat->p.cols();
  return SISYN_OK;
}

int sisyn_pattern_data(const sisyn_pattern* pat, uint8_t* out_row_major) {
  if (int rc = require(pat && out_row_major, "pattern_data: NULL argument")) return rc;
  for (int i = 0; i < pat->p.rows(); ++i)
    for (int j = 0; j < pat->p.cols(); ++j)
      out_row_major[i * pat->p.cols() + j] = pat->p.at(i, j) ? 1 : 0;
  return SISYN_OK;
}

void sisyn_pattern_free(sisyn_pattern* pat) { delete pat; }

void sisyn_pattern_list_free(sisyn_pattern** list, size_t count) {
  if (!list) return;
  for (size_t i = 0; i < count; ++i) delete list[i];
  std::free(list);
}

int sisyn_r_star(const sisyn_pattern* t, sisyn_pattern** out) {
  if (int rc = require(t && out, "r_star: NULL argument")) return rc;
  return guarded([&] {
    *out = new sisyn_pattern{sisyn::r_star(t->p)};
    return SISYN_OK;
  });
}

int sisyn_si_check(const sisyn_pattern* t, const sisyn_pattern* r, const sisyn_pattern* s,
                   int* holds, int triple[3]) {
  if (int rc = require(t && r && s && holds, "si_check: NULL argument")) return rc;
  return guarded([&] {
    const sisyn::SiVerdict v = sisyn::si_check(t->p, r->p, s->p);
    *holds = v.holds ? 1 : 0;
    if (triple)
      for (int i = 0; i < 3; ++i) triple[i] = v.violating_triple[i];
    return SISYN_OK;
  });
}

int sisyn_qi_check(const sisyn_pattern* s, const sisyn_pattern* delta, int* holds) {
  if (int rc = require(s && delta && holds, "qi_check: NULL argument")) return rc;
  return guarded([&] {
    *holds = sisyn::qi_check(s->p, delta->p) ? 1 : 0;
    return SISYN_OK;
  });
}

int sisyn_qi_superset(const sisyn_pattern* s, const sisyn_pattern* delta, sisyn_pattern** out) {
  if (int rc = require(s && delta && out, "qi_superset: NULL argument")) return rc;
  return guarded([&] {
    *out = new sisyn_pattern{sisyn::qi_superset(s->p, delta->p)};
    return SISYN_OK;
  });
}

int sisyn_qi_subsets(const sisyn_pattern* s, const sisyn_pattern* delta, int max_dist,
                     uint64_t budget, sisyn_pattern*** out, size_t* count) {
  if (int rc = require(s && delta && out && count, "qi_subsets: NULL argument")) return rc;
  return guarded([&] {
    const auto subs = sisyn::qi_subsets(s->p, delta->p, max_dist, subset_budget(budget));
    *count = subs.size();
    *out = nullptr;
    if (subs.empty()) return SISYN_OK;
    auto** list = static_cast<sisyn_pattern**>(std::malloc(sizeof(sisyn_pattern*) * subs.size()));
    if (!list) throw std::bad_alloc();
    for (size_t i = 0; i < subs.size(); ++i) list[i] = new sisyn_pattern{subs[i]};
    *out = list;
    return SISYN_OK;
  });
}

int sisyn_witness_inverse(const sisyn_pattern* r, uint64_t seed, double** x, int* n) {
  if (int rc = require(r && x && n, "witness_inverse: NULL argument")) return rc;
  return guarded([&] {
    const Eigen::MatrixXd m = sisyn::full_inverse_witness(r->p, seed);
    *x = dup_matrix(m);
    *n = static_cast<int>(m.rows());
    return SISYN_OK;
  });
}

int sisyn_witness_counterexample(const sisyn_pattern* t, const sisyn_pattern* r,
                                 const sisyn_pattern* s, uint64_t seed, double** y, double** x,
                                 int* m, int* p) {
  if (int rc = require(t && r && s && y && x && m && p, "witness_counterexample: NULL argument"))
    return rc;
  return guarded([&] {
    const sisyn::CounterexamplePair pair = sisyn::si_counterexample(t->p, r->p, s->p, seed);
    *y = dup_matrix(pair.y);
    *x = dup_matrix(pair.x);
    *m = static_cast<int>(pair.y.rows());
    *p = static_cast<int>(pair.y.cols());
    return SISYN_OK;
  });
}

int sisyn_synth_json(const char* problem_json, char** report_json) {
  if (int rc = require(problem_json && report_json, "synth_json: NULL argument")) return rc;
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(problem_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(std::string("problem: JSON parse error: ") + e.what());
    }
    const sisyn::SynthesisSpec spec = sisyn::parse_problem_json(j);
    const sisyn::SynthesisResult res = sisyn::synthesize(spec);
    *report_json = dup_string(sisyn::canonical_dump(sisyn::report_to_json(res)));
    return synth_status(res);
  });
}

int sisyn_synth_file(const char* path, char** report_json) {
  if (int rc = require(path && report_json, "synth_file: NULL argument")) return rc;
  return guarded([&] {
    const sisyn::SynthesisSpec spec = sisyn::parse_problem_file(path);
    const sisyn::SynthesisResult res = sisyn::synthesize(spec);
    *report_json = dup_string(sisyn::canonical_dump(sisyn::report_to_json(res)));
    return synth_status(res);
  });
}

int sisyn_sweep_json(const char* problem_json, const int* horizons, size_t count,
                     char** table_json) {
  if (int rc = require(problem_json && horizons && count > 0 && table_json,
                       "sweep_json: NULL or empty argument"))
    return rc;
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(problem_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(std::string("problem: JSON parse error: ") + e.what());
    }
    const sisyn::SynthesisSpec spec = sisyn::parse_problem_json(j);
    const std::vector<int> ns(horizons, horizons + count);
    const auto rows = sisyn::sweep_horizon(spec, ns);
    *table_json = dup_string(sisyn::canonical_dump(sisyn::sweep_to_json(rows)));
    return SISYN_OK;
  });
}

int sisyn_repro_example1(const char* variant, char** report_json) {
  if (int rc = require(variant && report_json, "repro_example1: NULL argument")) return rc;
  return guarded([&] {
    const sisyn::Example1Repro rep = sisyn::repro_example1(variant);
    *report_json = dup_string(sisyn::canonical_dump(example1_repro_json(rep)));
    if (rep.variant == "qi-subset" && rep.ok) {
      set_error("infeasible at every tested horizon (expected outcome)");
      return SISYN_INFEASIBLE;
    }
    if (!rep.ok) {
      set_error(rep.message);
      return SISYN_NUMERIC;
    }
    return SISYN_OK;
  });
}

int sisyn_repro_lqr(int size, uint64_t seed, char** report_json) {
  if (int rc = require(report_json != nullptr, "repro_lqr: NULL argument")) return rc;
  return guarded([&] {
    const sisyn::LqrRepro rep = sisyn::repro_lqr(size, seed);
    *report_json = dup_string(sisyn::canonical_dump(lqr_repro_json(rep)));
    if (!rep.ok) {
      set_error(rep.message);
      return SISYN_NUMERIC;
    }
    return SISYN_OK;
  });
}

}  // extern "C"
