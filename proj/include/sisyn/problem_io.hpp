#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sisyn/synthesis.hpp"

namespace sisyn {

/// Parses the problem JSON schema into a validated spec with defaults applied
/// (T = S, R = r_star(T), gamma = identity). Pattern fields accept a ".pat"
/// file path or inline rows; "R" additionally accepts "auto" (run Algorithm 1
/// on T) and "none" (drop the R-side constraint). Throws std::invalid_argument
/// on schema violations, with finalize_spec supplying the structural checks.
SynthesisSpec parse_problem_json(const nlohmann::json& j);
SynthesisSpec parse_problem_file(const std::string& path);

nlohmann::json report_to_json(const SynthesisResult& r);
nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows);

/// Canonical serialization: object keys sorted, every double rounded to 12
/// significant digits. Identical inputs give byte-identical output.
std::string canonical_dump(const nlohmann::json& j);

}  // namespace sisyn
