#include "rootdens/config.hpp"
#include "rootdens/metrics_bench.hpp"

#include <fmt/format.h>

#include <fstream>
#include <stdexcept>

namespace rootdens {

namespace {

std::string number(double v) { return fmt::format("{:.17g}", v); }

std::string summary_number(double v) { return fmt::format("{:.10g}", v); }

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string trials_csv(const ExperimentReport& report)
{
    std::string out = "experiment,trial,seed,estimator,delta,converged,iters\n";
    for (const auto& t : report.trials) {
        if (t.failed) {
            out += fmt::format("{},{},{},failed,NA,{},{}\n", t.experiment, t.trial, t.seed, 0, t.iterations);
            continue;
        }
        for (const auto& d : t.deltas)
            out += fmt::format("{},{},{},{},{},{},{}\n", t.experiment, t.trial, t.seed, d.estimator,
                               number(d.delta), t.converged ? 1 : 0, t.iterations);
    }
    return out;
}

std::string summary_csv(const ExperimentReport& report)
{
    std::string out = "estimator,mean_delta,std_delta,wins,ties,successes\n";
    if (report.successes == 0)
        return out;
    for (const auto& s : report.summaries)
        out += fmt::format("{},{},{},{},{},{}\n", s.estimator, summary_number(s.mean),
                           s.stddev ? summary_number(*s.stddev) : std::string("NA"), s.wins, report.ties,
                           report.successes);
    return out;
}

std::string plot_csv(const PlotData& data)
{
    std::string out;
    for (std::size_t i = 0; i < data.columns.size(); ++i)
        out += (i ? "," : "") + data.columns[i];
    out += '\n';
    for (const auto& row : data.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out += (i ? "," : "") + number(row[i]);
        out += '\n';
    }
    return out;
}

std::string format_summary_table(const ExperimentReport& report)
{
    std::string out = fmt::format("{} ({} trials, {} failed, s={})\n", report.config.name,
                                  report.successes + report.failures, report.failures, report.config.basis_size);
    out += fmt::format("{:<26}", "Estimator");
    for (const auto& s : report.summaries)
        out += fmt::format("{:>13}", s.estimator);
    out += fmt::format("\n{:<26}", "Mean value of Delta");
    for (const auto& s : report.summaries)
        out += fmt::format("{:>13.5g}", s.mean);
    out += fmt::format("\n{:<26}", "Standard deviation");
    for (const auto& s : report.summaries)
        out += s.stddev ? fmt::format("{:>13.5g}", *s.stddev) : fmt::format("{:>13}", "undefined");
    out += fmt::format("\n{:<26}", "Wins");
    for (const auto& s : report.summaries)
        out += fmt::format("{:>13}", s.wins);
    out += fmt::format("\nTies: {}\n", report.ties);
    for (const auto& note : report.config.notes)
        out += "Note: " + note + "\n";
    return out;
}

ReportFiles emit_report(const ExperimentReport& report, const std::filesystem::path& dir, const std::string& prefix,
                        const std::vector<std::size_t>& plot_trials)
{
    std::filesystem::create_directories(dir);
    ReportFiles files{dir / (prefix + "_trials.csv"), dir / (prefix + "_summary.csv"), dir / (prefix + "_report.json"), {}};
    write_file(files.trials_csv, trials_csv(report));
    write_file(files.summary_csv, summary_csv(report));

    Json summary = Json::array();
    for (const auto& s : report.summaries)
        summary.push_back({{"estimator", s.estimator},
                           {"mean_delta", s.mean},
                           {"std_delta", s.stddev ? Json(*s.stddev) : Json(nullptr)},
                           {"wins", s.wins}});
    Json failures = Json::array();
    for (const auto& t : report.trials)
        if (t.failed)
            failures.push_back({{"trial", t.trial}, {"seed", t.seed}, {"error", t.error}});
    const Json doc{{"config", to_json(report.config)},
                   {"trials", report.trials.size()},
                   {"successes", report.successes},
                   {"failures", failures},
                   {"ties", report.ties},
                   {"summary", summary}};
    write_file(files.report_json, doc.dump(2) + "\n");

    for (std::size_t t : plot_trials) {
        auto path = dir / fmt::format("{}_plot_t{}.csv", prefix, t);
        write_file(path, plot_csv(trial_curves(report.config, t)));
        files.plot_csvs.push_back(std::move(path));
    }
    return files;
}

}  // namespace rootdens
