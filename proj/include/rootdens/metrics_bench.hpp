#pragma once

// L1 accuracy metric and the Monte Carlo harness that compares the root
// estimator with its competitors on repeated samples from a known truth.

#include "rootdens/baselines.hpp"
#include "rootdens/distributions.hpp"
#include "rootdens/root_estimator.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rootdens {

/// A fitted estimator evaluable pointwise in data units. Evaluation returns 0
/// outside the estimator's own support.
class DensityEstimate {
public:
    DensityEstimate(std::string name, SupportKind support, std::function<double(double)> eval,
                    std::optional<int> lattice_max = std::nullopt);

    static DensityEstimate root(const PsiCoefficients& c, std::string name = "root");
    static DensityEstimate kernel(KernelEstimate est);
    static DensityEstimate projection(ProjectionEstimate est);
    static DensityEstimate frequency(FrequencyEstimate est);
    static DensityEstimate truth(const TrueDistribution& dist);

    const std::string& name() const { return name_; }
    SupportKind support() const { return support_; }
    double operator()(double x) const;

private:
    std::string name_;
    SupportKind support_;
    std::function<double(double)> eval_;
    std::optional<int> lattice_max_;
};

/// Integral (or lattice sum) of |estimate - truth|. Continuous integration
/// starts on mean +- 10 sd of the truth and widens until the neglected tail
/// mass of both functions is below 1e-9; discrete sums run until the truth's
/// cumulative mass reaches 1 - 1e-12 and the estimate has died out.
double l1_error(const TrueDistribution& truth, const DensityEstimate& estimate);

/// Plain lattice sum over 0..upper, used as an oracle for the truncated sum.
double l1_error_full_lattice(const TrueDistribution& truth, const DensityEstimate& estimate, int upper);

struct ExperimentConfig {
    std::string name;
    TrueDistribution truth;
    std::size_t sample_size = 100;
    BasisFamily family = BasisFamily::Hermite;
    std::size_t basis_size = 4;
    /// Kravchuk N; ignored by the other families
    int lattice_n = 0;
    /// moment-match the basis to each sample; false keeps the fixed frame
    /// z = x (Hermite shift 0, scale 1/sqrt 2)
    bool standardize = true;
    FitOptions fit;
    std::optional<double> bandwidth;
    bool clip_projection = false;
    std::uint64_t base_seed = 0;
    std::vector<std::string> notes;

    void validate() const;
    BasisSpec basis_for(const Sample& sample) const;
    std::vector<std::string> estimator_names() const;
};

struct EstimatorDelta {
    std::string estimator;
    double delta = 0.0;
};

struct TrialResult {
    std::string experiment;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::vector<EstimatorDelta> deltas;
    int iterations = 0;
    bool converged = false;
    bool failed = false;
    std::string error;
};

struct EstimatorSummary {
    std::string estimator;
    double mean = 0.0;
    /// sample standard deviation; empty with fewer than two successful trials
    std::optional<double> stddev;
    std::size_t wins = 0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<TrialResult> trials;
    std::vector<EstimatorSummary> summaries;
    std::size_t ties = 0;
    std::size_t successes = 0;
    std::size_t failures = 0;
};

/// The estimators of one trial, fitted on one shared sample.
struct TrialFits {
    Sample sample;
    std::vector<DensityEstimate> estimates;
    FitResult root_fit;
};

TrialFits fit_trial(const ExperimentConfig& config, std::size_t trial);
TrialResult run_trial(const ExperimentConfig& config, std::size_t trial);

/// Aggregates a finished list of trials (mean, sample sd, wins, ties).
ExperimentReport summarize(const ExperimentConfig& config, std::vector<TrialResult> trials);

/// `jobs` worker threads (0 = hardware concurrency); the report does not
/// depend on the number of workers.
ExperimentReport run_experiment(const ExperimentConfig& config, std::size_t n_trials, std::size_t jobs = 1);

struct PlotData {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Truth and every estimator of trial `trial` on a grid: 512 points across
/// `plot_bounds` for continuous truths, every lattice point otherwise.
PlotData trial_curves(const ExperimentConfig& config, std::size_t trial, std::size_t points = 512);
std::pair<double, double> plot_bounds(const TrueDistribution& truth);

struct ReportFiles {
    std::filesystem::path trials_csv;
    std::filesystem::path summary_csv;
    std::filesystem::path report_json;
    std::vector<std::filesystem::path> plot_csvs;
};

/// Writes <prefix>_trials.csv, <prefix>_summary.csv, <prefix>_report.json and
/// one <prefix>_plot_t<k>.csv per requested trial.
ReportFiles emit_report(const ExperimentReport& report, const std::filesystem::path& dir,
                        const std::string& prefix, const std::vector<std::size_t>& plot_trials = {});

std::string trials_csv(const ExperimentReport& report);
std::string summary_csv(const ExperimentReport& report);
std::string plot_csv(const PlotData& data);
/// Table layout: one column per estimator, rows for mean, sd and wins.
std::string format_summary_table(const ExperimentReport& report);

}  // namespace rootdens
