#pragma once

// JSON forms of the library's value types. Every *_from_json rejects keys it
// does not know, and to_json output parses back to an equal value.

#include "rootdens/metrics_bench.hpp"

#include <json.hpp>

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace rootdens {

using Json = nlohmann::json;

/// Throws std::invalid_argument naming the first key of `obj` not in `allowed`.
void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                         std::string_view context);

Json to_json(const BasisSpec& spec);
BasisSpec basis_from_json(const Json& j);

/// {"basis": ..., "coeffs": [re0, im0, re1, im1, ...]}
Json to_json(const PsiCoefficients& c);
PsiCoefficients psi_from_json(const Json& j);

Json to_json(const FitOptions& opts);
FitOptions fit_options_from_json(const Json& j, FitOptions defaults = {});

Json to_json(const TrueDistribution& dist);
/// Mixture weights are rescaled to sum to one. A gauss_poly truth is given
/// either by "coeffs" or by "random_degree" + "poly_seed" (f = |q|^2).
TrueDistribution distribution_from_json(const Json& j);

Json to_json(const ExperimentConfig& config);
ExperimentConfig experiment_from_json(const Json& j);

struct BuiltinExperiment {
    ExperimentConfig config;
    std::vector<std::size_t> sweep;
    std::size_t headline_size = 0;
};

std::vector<std::string> builtin_experiment_names();
/// table1, fig1_lower, fig2_upper, fig2_lower, table2, table3.
BuiltinExperiment builtin_experiment(std::string_view name);

}  // namespace rootdens
