#pragma once

#include <string>

#include "json.hpp"
#include "qinst/assemblage.hpp"
#include "qinst/instrumentality.hpp"
#include "qinst/matrix.hpp"
#include "qinst/steering.hpp"

namespace qinst {

// Matrix wire format: {"dim": d, "entries": [[re, im], ...]} row-major.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json hermitian_to_json(const HermitianMatrix& m);
HermitianMatrix hermitian_from_json(const nlohmann::json& j);

// Assemblage wire format:
// {"num_outcomes": A, "num_inputs": X, "dim": d, "blocks": {"a|x": matrix}}.
nlohmann::json assemblage_to_json(const Assemblage& s);
Assemblage assemblage_from_json(const nlohmann::json& j);

// Witness wire format: assemblage fields plus {"beta": ..., "scale": ...}.
nlohmann::json witness_to_json(const Witness& w);
Witness witness_from_json(const nlohmann::json& j);

nlohmann::json membership_result_to_json(const MembershipResult& r);
nlohmann::json robustness_result_to_json(const RobustnessResult& r);
nlohmann::json steering_result_to_json(const SteeringResult& r);

// Locale-independent decimal rendering with the given number of significant
// digits.
std::string format_significant(double value, int digits);

// Parses a JSON document, reporting the line number on failure.
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);
nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace qinst
