// rootdens: fit, sample, benchmark and basis-check commands.

#include "rootdens/config.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace rootdens;

namespace {

/// Flags shared by the commands; unset values fall back to the config file.
struct CommonFlags {
    std::string config_path;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    std::string out;
    std::string sizes;
    std::optional<double> alpha;
    std::optional<double> tol;
};

void add_common(CLI::App& cmd, CommonFlags& f, bool with_trials)
{
    cmd.add_option("--config", f.config_path, "JSON configuration file; flags override its values")
        ->check(CLI::ExistingFile);
    if (with_trials) {
        cmd.add_option("--trials", f.trials, "number of Monte Carlo trials")->check(CLI::PositiveNumber);
        cmd.add_option("--jobs", f.jobs, "worker threads (default: available cores)")->check(CLI::PositiveNumber);
    }
    cmd.add_option("--seed", f.seed, "base random seed");
    cmd.add_option("--out", f.out, "output directory");
    cmd.add_option("--s", f.sizes, "basis size, or a list such as 4,6,8 or a range 4-8");
    cmd.add_option("--alpha", f.alpha, "relaxation factor of the fixed-point update, in (0,1]");
    cmd.add_option("--tol", f.tol, "convergence tolerance on max |R(c) - c|");
}

Json load_json(const std::string& path)
{
    if (path.empty())
        return Json::object();
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read config file " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument("config file " + path + ": " + e.what());
    }
}

/// "4,6,8", "4-8" or a mix of both.
std::vector<std::size_t> parse_list(const std::string& text, std::string_view flag, std::size_t minimum)
{
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    auto number = [&](const std::string& s) {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || v < minimum)
            throw std::invalid_argument(fmt::format("{}: '{}' is not an integer >= {}", flag, s, minimum));
        return v;
    };
    while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            out.push_back(number(item));
            continue;
        }
        const std::size_t lo = number(item.substr(0, dash));
        const std::size_t hi = number(item.substr(dash + 1));
        if (hi < lo)
            throw std::invalid_argument(fmt::format("{}: empty range '{}'", flag, item));
        for (std::size_t s = lo; s <= hi; ++s)
            out.push_back(s);
    }
    if (out.empty())
        throw std::invalid_argument(fmt::format("{}: no values given", flag));
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text) { return parse_list(text, "--s", 1); }

/// One numeric literal per line; a trailing newline is allowed.
std::vector<double> read_sample_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read sample file " + path);
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        const auto last = line.find_last_not_of(" \t");
        if (first == std::string::npos)
            throw std::invalid_argument(fmt::format("{}:{}: empty line", path, line_no));
        const std::string token = line.substr(first, last - first + 1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v))
            throw std::invalid_argument(fmt::format("{}:{}: malformed value '{}'", path, line_no, token));
        values.push_back(v);
    }
    if (values.empty())
        throw std::invalid_argument(path + ": no values");
    return values;
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

SupportKind support_of(BasisFamily family)
{
    return BasisSpec{.family = family, .size = 1, .n_trials = 1}.support();
}

// fit ---------------------------------------------------------------------

struct FitCommand {
    CommonFlags common;
    std::string input;
    std::string family;
    std::optional<int> lattice_n;
    std::optional<int> max_iters;
    std::optional<double> complex_start;
    std::optional<std::size_t> sample_size;
    bool baselines = false;
    bool fixed_frame = false;
};

int run_fit(const FitCommand& cmd)
{
    Json cfg = load_json(cmd.common.config_path);
    reject_unknown_keys(cfg, {"input", "distribution", "sample_size", "seed", "basis", "fit", "baselines"}, "fit config");
    Json basis_cfg = cfg.value("basis", Json::object());
    reject_unknown_keys(basis_cfg, {"family", "size", "standardize", "lattice_n"}, "fit config.basis");

    const BasisFamily family = parse_family(!cmd.family.empty() ? cmd.family : basis_cfg.value("family", "hermite"));
    std::size_t size = basis_cfg.value<std::size_t>("size", 6);
    if (!cmd.common.sizes.empty()) {
        const auto sizes = parse_sizes(cmd.common.sizes);
        if (sizes.size() != 1)
            throw std::invalid_argument("fit takes a single --s value");
        size = sizes.front();
    }
    const bool standardize = cmd.fixed_frame ? false : basis_cfg.value("standardize", true);
    const int lattice_n = cmd.lattice_n.value_or(basis_cfg.value("lattice_n", 0));

    FitOptions opts = cfg.contains("fit") ? fit_options_from_json(cfg.at("fit")) : FitOptions{};
    if (cmd.common.alpha)
        opts.alpha = *cmd.common.alpha;
    if (cmd.common.tol)
        opts.tol = *cmd.common.tol;
    if (cmd.max_iters)
        opts.max_iters = *cmd.max_iters;
    if (cmd.complex_start)
        opts.complex_start = *cmd.complex_start;
    opts.validate();

    Sample sample;
    sample.kind = support_of(family);
    const std::string input = !cmd.input.empty() ? cmd.input : cfg.value("input", "");
    if (!input.empty()) {
        sample.points = read_sample_file(input);
    } else if (cfg.contains("distribution")) {
        const TrueDistribution truth = distribution_from_json(cfg.at("distribution"));
        const std::size_t n = cmd.sample_size.value_or(cfg.value<std::size_t>("sample_size", 0));
        if (n == 0)
            throw std::invalid_argument("sample_size must be positive");
        sample.points = draw(truth, n, cmd.common.seed.value_or(cfg.value<std::uint64_t>("seed", 0)));
    } else {
        throw std::invalid_argument("fit needs --input FILE or a config with a distribution");
    }
    sample.validate();

    BasisSpec basis;
    if (standardize) {
        basis = moment_matched(family, size, sample.points, lattice_n);
    } else {
        if (family != BasisFamily::Hermite)
            throw std::invalid_argument("the fixed frame is only defined for the Hermite basis");
        basis = BasisSpec::hermite(size, 0.0, 1.0 / std::numbers::sqrt2);
    }

    const FitResult result = fit(sample, basis, opts);

    Json coeffs = to_json(result.psi);
    coeffs["diagnostics"] = {{"iterations", result.iterations},
                             {"converged", result.converged},
                             {"residual", result.residual},
                             {"log_likelihood", result.log_likelihood},
                             {"sample_size", sample.size()}};

    std::vector<DensityEstimate> curves{DensityEstimate::root(result.psi)};
    if (cmd.baselines || cfg.value("baselines", false)) {
        curves.push_back(DensityEstimate::projection(projection_fit(sample, density_frame(basis))));
        if (is_discrete(sample.kind))
            curves.push_back(DensityEstimate::frequency(frequency_fit(sample.points)));
        else
            curves.push_back(DensityEstimate::kernel(kernel_fit(sample.points)));
    }

    std::vector<double> grid;
    const auto [lo_it, hi_it] = std::minmax_element(sample.points.begin(), sample.points.end());
    if (is_discrete(sample.kind)) {
        const int top = family == BasisFamily::Kravchuk ? basis.n_trials : static_cast<int>(*hi_it) + 10;
        for (int x = 0; x <= top; ++x)
            grid.push_back(x);
    } else {
        const double pad = 0.25 * (*hi_it - *lo_it) + 1.0;
        const double lo = sample.kind == SupportKind::HalfLine ? 0.0 : *lo_it - pad;
        const double hi = *hi_it + pad;
        constexpr int points = 512;
        for (int i = 0; i < points; ++i)
            grid.push_back(lo + (hi - lo) * i / (points - 1));
    }
    std::string csv = "x";
    for (const auto& c : curves)
        csv += ",p_" + c.name();
    csv += '\n';
    for (double x : grid) {
        csv += fmt::format("{:.17g}", x);
        for (const auto& c : curves)
            csv += fmt::format(",{:.17g}", c(x));
        csv += '\n';
    }

    const fs::path dir = cmd.common.out.empty() ? fs::path(".") : fs::path(cmd.common.out);
    write_text(dir / "fit_coeffs.json", coeffs.dump(2) + "\n");
    write_text(dir / "fit_density.csv", csv);
    fmt::print("s={} iterations={} converged={} residual={:.3g} log_likelihood={:.10g}\n", basis.size,
               result.iterations, result.converged, result.residual, result.log_likelihood);
    fmt::print("wrote {} and {}\n", (dir / "fit_coeffs.json").string(), (dir / "fit_density.csv").string());
    return result.converged ? 0 : 1;
}

// sample ------------------------------------------------------------------

struct SampleCommand {
    CommonFlags common;
    std::string builtin;
    std::optional<std::size_t> n;
};

int run_sample(const SampleCommand& cmd)
{
    Json cfg = load_json(cmd.common.config_path);
    reject_unknown_keys(cfg, {"distribution", "sample_size", "seed"}, "sample config");
    std::optional<TrueDistribution> truth;
    std::size_t n = cfg.value<std::size_t>("sample_size", 0);
    if (!cmd.builtin.empty()) {
        const auto b = builtin_experiment(cmd.builtin);
        truth = b.config.truth;
        if (n == 0)
            n = b.config.sample_size;
    } else if (cfg.contains("distribution")) {
        truth = distribution_from_json(cfg.at("distribution"));
    } else {
        throw std::invalid_argument("sample needs --builtin NAME or a config with a distribution");
    }
    if (cmd.n)
        n = *cmd.n;
    if (n == 0)
        throw std::invalid_argument("sample size must be positive");

    const auto values = draw(*truth, n, cmd.common.seed.value_or(cfg.value<std::uint64_t>("seed", 0)));
    std::string text;
    for (double v : values)
        text += fmt::format("{:.17g}\n", v);
    if (cmd.common.out.empty()) {
        std::cout << text;
    } else {
        const fs::path path = fs::path(cmd.common.out) / "sample.txt";
        write_text(path, text);
        fmt::print(stderr, "wrote {} values to {}\n", n, path.string());
    }
    return 0;
}

// benchmark ---------------------------------------------------------------

struct BenchmarkCommand {
    CommonFlags common;
    std::string experiment;
    std::string plot_trials = "0";
};

int run_benchmark(const BenchmarkCommand& cmd)
{
    Json cfg = load_json(cmd.common.config_path);
    std::vector<std::size_t> sweep;
    std::size_t trials = 100;
    if (!cmd.experiment.empty() && !cfg.empty())
        throw std::invalid_argument("give either a built-in experiment name or --config, not both");
    if (cmd.experiment.empty() && cfg.empty())
        throw std::invalid_argument("benchmark needs an experiment name or --config");
    ExperimentConfig config = [&] {
        if (!cmd.experiment.empty()) {
            auto b = builtin_experiment(cmd.experiment);
            sweep = b.sweep;
            return b.config;
        }
        if (cfg.contains("trials"))
            trials = cfg.at("trials").get<std::size_t>();
        if (cfg.contains("sweep"))
            sweep = cfg.at("sweep").get<std::vector<std::size_t>>();
        cfg.erase("trials");
        cfg.erase("sweep");
        auto c = experiment_from_json(cfg);
        if (sweep.empty())
            sweep = {c.basis_size};
        return c;
    }();

    if (cmd.common.trials)
        trials = *cmd.common.trials;
    if (cmd.common.seed)
        config.base_seed = *cmd.common.seed;
    if (cmd.common.alpha)
        config.fit.alpha = *cmd.common.alpha;
    if (cmd.common.tol)
        config.fit.tol = *cmd.common.tol;
    if (!cmd.common.sizes.empty())
        sweep = parse_sizes(cmd.common.sizes);
    const std::size_t jobs = cmd.common.jobs.value_or(std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::size_t> plots;
    if (!cmd.plot_trials.empty())
        for (std::size_t t : parse_list(cmd.plot_trials, "--plot-trials", 0))
            if (t < trials)
                plots.push_back(t);

    // Validate every sweep point before running any of them.
    std::vector<ExperimentConfig> runs;
    for (std::size_t s : sweep) {
        ExperimentConfig c = config;
        c.basis_size = s;
        c.fit.validate();
        c.validate();
        runs.push_back(std::move(c));
    }

    const fs::path dir = cmd.common.out.empty() ? fs::path("results") : fs::path(cmd.common.out);
    std::size_t failures = 0;
    for (const auto& c : runs) {
        const ExperimentReport report = run_experiment(c, trials, jobs);
        fmt::print("{}\n", format_summary_table(report));
        emit_report(report, dir, fmt::format("{}_s{}", c.name, c.basis_size), plots);
        failures += report.failures;
    }
    fmt::print("reports written to {}\n", dir.string());
    return failures == 0 ? 0 : 1;
}

// bases -------------------------------------------------------------------

struct BasesCommand {
    CommonFlags common;
    std::string family = "hermite";
    double shift = 0.0;
    double scale = 1.0;
    int lattice_n = 100;
    double success_p = 0.45;
    double lambda = 5.0;
};

int run_bases(const BasesCommand& cmd)
{
    Json cfg = load_json(cmd.common.config_path);
    std::vector<BasisSpec> specs;
    if (cfg.contains("basis")) {
        reject_unknown_keys(cfg, {"basis"}, "bases config");
        specs.push_back(basis_from_json(cfg.at("basis")));
    } else {
        if (!cfg.empty())
            throw std::invalid_argument("bases config: expected a 'basis' object");
        const BasisFamily family = parse_family(cmd.family);
        for (std::size_t s : parse_sizes(cmd.common.sizes.empty() ? std::string("12") : cmd.common.sizes)) {
            switch (family) {
            case BasisFamily::Hermite:
                specs.push_back(BasisSpec::hermite(s, cmd.shift, cmd.scale));
                break;
            case BasisFamily::Laguerre:
                specs.push_back(BasisSpec::laguerre(s, cmd.scale));
                break;
            case BasisFamily::Kravchuk:
                specs.push_back(BasisSpec::kravchuk(s, cmd.lattice_n, cmd.success_p));
                break;
            case BasisFamily::Charlier:
                specs.push_back(BasisSpec::charlier(s, cmd.lambda));
                break;
            }
        }
    }
    for (const auto& spec : specs) {
        const Eigen::MatrixXd g = gram_check(spec);
        fmt::print("{} s={} max|G-I|={:.3e}\n", to_string(spec.family), spec.size, identity_deviation(g));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Root (psi-function) density estimation"};
    app.require_subcommand(1);

    FitCommand fit_cmd;
    auto* fit_app = app.add_subcommand("fit", "fit the root estimator to a sample file or a drawn sample");
    add_common(*fit_app, fit_cmd.common, false);
    fit_app->add_option("--input", fit_cmd.input, "sample file, one value per line");
    fit_app->add_option("--family", fit_cmd.family, "hermite | laguerre | kravchuk | charlier");
    fit_app->add_option("--lattice-n", fit_cmd.lattice_n, "Kravchuk lattice size N");
    fit_app->add_option("--max-iters", fit_cmd.max_iters, "iteration limit");
    fit_app->add_option("--complex-start", fit_cmd.complex_start, "imaginary offset of the start vector");
    fit_app->add_option("--n", fit_cmd.sample_size, "sample size when drawing from the config distribution");
    fit_app->add_flag("--baselines", fit_cmd.baselines, "add projection and kernel/frequency curves");
    fit_app->add_flag("--fixed-frame", fit_cmd.fixed_frame, "Hermite frame z = x instead of moment matching");

    SampleCommand sample_cmd;
    auto* sample_app = app.add_subcommand("sample", "draw a sample from a configured distribution");
    add_common(*sample_app, sample_cmd.common, false);
    sample_app->add_option("--builtin", sample_cmd.builtin, "use the truth of a built-in experiment");
    sample_app->add_option("--n", sample_cmd.n, "sample size");

    BenchmarkCommand bench_cmd;
    auto* bench_app = app.add_subcommand("benchmark", "run a Monte Carlo comparison of the estimators");
    add_common(*bench_app, bench_cmd.common, true);
    bench_app->add_option("experiment", bench_cmd.experiment,
                          "built-in experiment: table1 fig1_lower fig2_upper fig2_lower table2 table3");
    bench_app->add_option("--plot-trials", bench_cmd.plot_trials, "trials to write plot data for (empty for none)");

    BasesCommand bases_cmd;
    auto* bases_app = app.add_subcommand("bases", "print Gram-matrix residuals of a basis");
    add_common(*bases_app, bases_cmd.common, false);
    bases_app->add_option("--family", bases_cmd.family, "hermite | laguerre | kravchuk | charlier");
    bases_app->add_option("--shift", bases_cmd.shift, "Hermite shift");
    bases_app->add_option("--scale", bases_cmd.scale, "Hermite or Laguerre scale");
    bases_app->add_option("--lattice-n", bases_cmd.lattice_n, "Kravchuk N");
    bases_app->add_option("--p", bases_cmd.success_p, "Kravchuk success probability");
    bases_app->add_option("--lambda", bases_cmd.lambda, "Charlier mean");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit_app->parsed())
            return run_fit(fit_cmd);
        if (sample_app->parsed())
            return run_sample(sample_cmd);
        if (bench_app->parsed())
            return run_benchmark(bench_cmd);
        return run_bases(bases_cmd);
    } catch (const ZeroPsiAtDataPoint& e) {
        fmt::print(stderr, "error: {}\n", e.what());
    } catch (const GaussPolyError& e) {
        fmt::print(stderr, "error: GaussPolyError: {}\n", e.what());
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
    }
    return 1;
}
