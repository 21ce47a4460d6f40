#include "rootdens/config.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rootdens {

namespace {

std::vector<double> normalized_weights(const Json& j)
{
    auto w = j.get<std::vector<double>>();
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(total > 0.0))
        throw std::invalid_argument("mixture weights must have a positive sum");
    if (std::abs(total - 1.0) <= 1e-12)
        return w;
    for (double& x : w)
        x /= total;
    return w;
}

template <class T>
T required(const Json& j, const char* key, std::string_view context)
{
    if (!j.contains(key))
        throw std::invalid_argument(std::string(context) + ": missing key '" + key + "'");
    return j.at(key).get<T>();
}

/// Polynomials of the built-in gauss-poly experiments.
constexpr std::uint64_t TABLE2_POLY_SEED = 2;
constexpr std::uint64_t TABLE3_POLY_SEED = 3;

}  // namespace

void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                         std::string_view context)
{
    if (!obj.is_object())
        throw std::invalid_argument(std::string(context) + ": expected an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (auto key : allowed)
            known = known || item.key() == key;
        if (!known)
            throw std::invalid_argument(std::string(context) + ": unknown key '" + item.key() + "'");
    }
}

Json to_json(const BasisSpec& spec)
{
    Json j{{"family", std::string(to_string(spec.family))}, {"size", spec.size}};
    switch (spec.family) {
    case BasisFamily::Hermite:
        j["shift"] = spec.shift;
        j["scale"] = spec.scale;
        break;
    case BasisFamily::Laguerre:
        j["scale"] = spec.scale;
        break;
    case BasisFamily::Kravchuk:
        j["n_trials"] = spec.n_trials;
        j["success_p"] = spec.success_p;
        break;
    case BasisFamily::Charlier:
        j["lambda"] = spec.lambda;
        break;
    }
    return j;
}

BasisSpec basis_from_json(const Json& j)
{
    reject_unknown_keys(j, {"family", "size", "shift", "scale", "n_trials", "success_p", "lambda"}, "basis");
    BasisSpec spec;
    spec.family = parse_family(required<std::string>(j, "family", "basis"));
    spec.size = required<std::size_t>(j, "size", "basis");
    spec.shift = j.value("shift", spec.shift);
    spec.scale = j.value("scale", spec.scale);
    spec.n_trials = j.value("n_trials", spec.n_trials);
    spec.success_p = j.value("success_p", spec.success_p);
    spec.lambda = j.value("lambda", spec.lambda);
    spec.validate();
    return spec;
}

Json to_json(const PsiCoefficients& c)
{
    Json coeffs = Json::array();
    for (const auto& z : c.coeffs) {
        coeffs.push_back(z.real());
        coeffs.push_back(z.imag());
    }
    return {{"basis", to_json(c.basis)}, {"coeffs", coeffs}};
}

PsiCoefficients psi_from_json(const Json& j)
{
    reject_unknown_keys(j, {"basis", "coeffs", "diagnostics"}, "psi");
    PsiCoefficients c;
    c.basis = basis_from_json(required<Json>(j, "basis", "psi"));
    const auto flat = required<std::vector<double>>(j, "coeffs", "psi");
    if (flat.size() != 2 * c.basis.size)
        throw std::invalid_argument("psi: expected 2*s interleaved re/im coefficients");
    for (std::size_t i = 0; i < c.basis.size; ++i)
        c.coeffs.emplace_back(flat[2 * i], flat[2 * i + 1]);
    return c;
}

Json to_json(const FitOptions& opts)
{
    return {{"alpha", opts.alpha},
            {"max_iters", opts.max_iters},
            {"tol", opts.tol},
            {"guard_eps", opts.guard_eps},
            {"complex_start", opts.complex_start},
            {"restarts", opts.restarts},
            {"restart_seed", opts.restart_seed}};
}

FitOptions fit_options_from_json(const Json& j, FitOptions defaults)
{
    reject_unknown_keys(j, {"alpha", "max_iters", "tol", "guard_eps", "complex_start", "restarts", "restart_seed"},
                        "fit");
    FitOptions o = defaults;
    o.alpha = j.value("alpha", o.alpha);
    o.max_iters = j.value("max_iters", o.max_iters);
    o.tol = j.value("tol", o.tol);
    o.guard_eps = j.value("guard_eps", o.guard_eps);
    o.complex_start = j.value("complex_start", o.complex_start);
    o.restarts = j.value("restarts", o.restarts);
    o.restart_seed = j.value("restart_seed", o.restart_seed);
    o.validate();
    return o;
}

Json to_json(const TrueDistribution& dist)
{
    struct Visitor {
        Json operator()(const NormalMixture& m) const
        {
            return {{"type", "normal_mixture"}, {"weights", m.weights}, {"means", m.means}, {"sigmas", m.sigmas}};
        }
        Json operator()(const ExpChiSqMixture& m) const
        {
            return {{"type", "exp_chisq_mixture"},
                    {"weights", m.weights},
                    {"exp_mean", m.exp_mean},
                    {"chisq_df", m.chisq_df}};
        }
        Json operator()(const BinomialMixture& m) const
        {
            return {{"type", "binomial_mixture"}, {"weights", m.weights}, {"trials", m.trials}, {"probs", m.probs}};
        }
        Json operator()(const PoissonMixture& m) const
        {
            return {{"type", "poisson_mixture"}, {"weights", m.weights}, {"lambdas", m.lambdas}};
        }
        Json operator()(const GaussPolyTruth& g) const { return {{"type", "gauss_poly"}, {"coeffs", g.poly}}; }
    };
    return std::visit(Visitor{}, dist.variant());
}

TrueDistribution distribution_from_json(const Json& j)
{
    const auto type = required<std::string>(j, "type", "distribution");
    if (type == "normal_mixture") {
        reject_unknown_keys(j, {"type", "weights", "means", "sigmas"}, "normal_mixture");
        return TrueDistribution(NormalMixture{normalized_weights(j.at("weights")),
                                              required<std::vector<double>>(j, "means", type),
                                              required<std::vector<double>>(j, "sigmas", type)});
    }
    if (type == "exp_chisq_mixture") {
        reject_unknown_keys(j, {"type", "weights", "exp_mean", "chisq_df"}, "exp_chisq_mixture");
        return TrueDistribution(ExpChiSqMixture{normalized_weights(j.at("weights")),
                                                required<double>(j, "exp_mean", type),
                                                required<int>(j, "chisq_df", type)});
    }
    if (type == "binomial_mixture") {
        reject_unknown_keys(j, {"type", "weights", "trials", "probs"}, "binomial_mixture");
        return TrueDistribution(BinomialMixture{normalized_weights(j.at("weights")),
                                                required<std::vector<int>>(j, "trials", type),
                                                required<std::vector<double>>(j, "probs", type)});
    }
    if (type == "poisson_mixture") {
        reject_unknown_keys(j, {"type", "weights", "lambdas"}, "poisson_mixture");
        return TrueDistribution(PoissonMixture{normalized_weights(j.at("weights")),
                                               required<std::vector<double>>(j, "lambdas", type)});
    }
    if (type == "gauss_poly") {
        reject_unknown_keys(j, {"type", "coeffs", "random_degree", "poly_seed"}, "gauss_poly");
        if (j.contains("coeffs")) {
            if (j.contains("random_degree"))
                throw std::invalid_argument("gauss_poly: give either coeffs or random_degree, not both");
            return TrueDistribution(GaussPolyTruth::from_poly(j.at("coeffs").get<std::vector<double>>()));
        }
        const int degree = required<int>(j, "random_degree", type);
        const auto seed = j.value<std::uint64_t>("poly_seed", 0);
        return TrueDistribution(GaussPolyTruth::from_poly(random_square_modulus(degree, seed)));
    }
    throw std::invalid_argument("unknown distribution type '" + type + "'");
}

Json to_json(const ExperimentConfig& c)
{
    Json j{{"name", c.name},
           {"distribution", to_json(c.truth)},
           {"sample_size", c.sample_size},
           {"basis", {{"family", std::string(to_string(c.family))}, {"size", c.basis_size}, {"standardize", c.standardize}}},
           {"fit", to_json(c.fit)},
           {"kernel", {{"bandwidth", c.bandwidth ? Json(*c.bandwidth) : Json(nullptr)}, {"rule", c.bandwidth ? "fixed" : "silverman"}}},
           {"projection", {{"clip", c.clip_projection}}},
           {"base_seed", c.base_seed},
           {"notes", c.notes}};
    if (c.family == BasisFamily::Kravchuk)
        j["basis"]["lattice_n"] = c.lattice_n;
    return j;
}

ExperimentConfig experiment_from_json(const Json& j)
{
    reject_unknown_keys(j, {"name", "distribution", "sample_size", "basis", "fit", "kernel", "projection", "base_seed", "notes"},
                        "experiment");
    ExperimentConfig c{.name = required<std::string>(j, "name", "experiment"),
                       .truth = distribution_from_json(required<Json>(j, "distribution", "experiment"))};
    c.sample_size = required<std::size_t>(j, "sample_size", "experiment");

    const Json basis = required<Json>(j, "basis", "experiment");
    reject_unknown_keys(basis, {"family", "size", "standardize", "lattice_n"}, "experiment.basis");
    c.family = parse_family(required<std::string>(basis, "family", "experiment.basis"));
    c.basis_size = required<std::size_t>(basis, "size", "experiment.basis");
    c.standardize = basis.value("standardize", true);
    c.lattice_n = basis.value("lattice_n", 0);

    if (j.contains("fit"))
        c.fit = fit_options_from_json(j.at("fit"));
    if (j.contains("kernel")) {
        const Json& k = j.at("kernel");
        reject_unknown_keys(k, {"bandwidth", "rule"}, "experiment.kernel");
        if (k.contains("bandwidth") && !k.at("bandwidth").is_null())
            c.bandwidth = k.at("bandwidth").get<double>();
    }
    if (j.contains("projection")) {
        reject_unknown_keys(j.at("projection"), {"clip"}, "experiment.projection");
        c.clip_projection = j.at("projection").value("clip", false);
    }
    c.base_seed = j.value<std::uint64_t>("base_seed", 0);
    c.notes = j.value("notes", std::vector<std::string>{});
    c.validate();
    return c;
}

std::vector<std::string> builtin_experiment_names()
{
    return {"table1", "fig1_lower", "fig2_upper", "fig2_lower", "table2", "table3"};
}

BuiltinExperiment builtin_experiment(std::string_view name)
{
    auto make = [&](TrueDistribution truth, std::size_t n, BasisFamily family) {
        return ExperimentConfig{.name = std::string(name), .truth = std::move(truth), .sample_size = n, .family = family};
    };
    // Headline sizes are the best-performing sweep points for the root fit.
    auto with_sweep = [](ExperimentConfig c, std::size_t headline) {
        c.basis_size = headline;
        return BuiltinExperiment{std::move(c), {4, 5, 6, 7, 8}, headline};
    };

    BuiltinExperiment b = [&] {
        if (name == "table1")
            return with_sweep(make(TrueDistribution(NormalMixture{{0.7, 0.3}, {0.0, 3.0}, {1.0, 1.0}}), 200,
                                   BasisFamily::Hermite), 8);
        if (name == "fig1_lower")
            return with_sweep(make(TrueDistribution(ExpChiSqMixture{{0.5, 0.5}, 2.0, 12}), 400, BasisFamily::Laguerre), 8);
        if (name == "fig2_upper") {
            auto c = make(TrueDistribution(BinomialMixture{{2.0 / 3.0, 1.0 / 3.0}, {100, 100}, {0.45, 0.55}}), 300,
                          BasisFamily::Kravchuk);
            c.lattice_n = 100;
            return with_sweep(std::move(c), 4);
        }
        if (name == "fig2_lower")
            return with_sweep(make(TrueDistribution(PoissonMixture{{1.0 / 3.0, 2.0 / 3.0}, {2.0, 5.0}}), 300,
                                   BasisFamily::Charlier), 4);
        if (name == "table2" || name == "table3") {
            const bool quartic = name == "table2";
            const std::size_t s = quartic ? 3 : 4;
            auto c = make(TrueDistribution(GaussPolyTruth::from_poly(random_square_modulus(
                              quartic ? 2 : 3, quartic ? TABLE2_POLY_SEED : TABLE3_POLY_SEED))),
                          1000, BasisFamily::Hermite);
            c.standardize = false;
            c.fit.complex_start = 0.1;
            c.basis_size = s;
            if (!quartic)
                c.notes.push_back("s=4: four-dimensional psi space for a degree-6 polynomial factor");
            return BuiltinExperiment{std::move(c), {s}, s};
        }
        throw std::invalid_argument("unknown built-in experiment '" + std::string(name) + "'");
    }();
    b.config.validate();
    return b;
}

}  // namespace rootdens
