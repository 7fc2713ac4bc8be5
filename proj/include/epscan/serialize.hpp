#pragma once

#include <string>

#include <json.hpp>

#include "epscan/continuation.hpp"
#include "epscan/degeneracy.hpp"
#include "epscan/model.hpp"

namespace epscan {

using Json = nlohmann::json;

// ModelSpec as a flat object: {"omega":[6,4,2],"epsilon":[0.0,1.0,2.3333],"pairs":4,"zeta":1.0}
Json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const Json& j);       // throws InvalidSpec on malformed input
ModelSpec load_spec_file(const std::string& path);

// Row-major array of [re, im] pairs plus label and dimension.
Json matrix_to_json(const Matrix& m, const std::string& label);

Json polynomial_to_json(const ComplexPolynomial& poly);
ComplexPolynomial polynomial_from_json(const Json& j);

Json identity_report_to_json(const IdentityReport& report);

Json degeneracy_set_to_json(const DegeneracySet& set);
DegeneracySet degeneracy_set_from_json(const Json& j);

Json sweep_result_to_json(const SweepResult& result);

// Fixed column order: parameter, trajectory_id, re_g, im_g, multiplicity, kind, event
std::string sweep_result_to_csv(const SweepResult& result);

void write_text_file(const std::string& path, const std::string& content);

DegeneracyKind kind_from_string(const std::string& s);

} // namespace epscan
