#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <cobrah/cobrah.hpp>
#include <cobrah/report.hpp>

namespace {

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kBadInput = 2;

bool is_input_error(cobrah::ErrorCode c) {
    using cobrah::ErrorCode;
    return c == ErrorCode::ConfigError || c == ErrorCode::ParseError || c == ErrorCode::OrderError ||
           c == ErrorCode::EmptyHistory || c == ErrorCode::CapacityExceedsArms;
}

int fail(int code, const std::string& what) {
    std::cerr << "cobrah: " << what << '\n';
    return code;
}

struct SimulateArgs {
    std::string config;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
    cobrah::RunInfo info;
    std::vector<cobrah::ArmSpec> arms;
    std::string out_dir;
    try {
        info.config = cobrah::load_config(a.config);
        for (const auto& o : a.overrides) cobrah::apply_override(info.config, o);
        if (a.seed) info.config.values["experiment.seed"] = std::to_string(*a.seed);
        info.experiment = cobrah::to_experiment_config(info.config);
        arms = cobrah::build_cohort(info.experiment);
        cobrah::validate(info.experiment, arms.size());
        out_dir = a.out.empty() ? cobrah::config_output_dir(info.config, "run") : a.out;
    } catch (const std::exception& e) {
        return fail(kBadInput, e.what());
    }
    try {
        info.started = std::chrono::system_clock::now();
        const auto bundle = cobrah::run_experiment(info.experiment);
        info.finished = std::chrono::system_clock::now();
        const auto files = cobrah::write_run(out_dir, info, bundle);
        for (const auto& s : bundle.summaries) {
            std::cout << s.name << ": final regret " << cobrah::detail::fixed6(s.final_regret) << ", long-run average "
                      << cobrah::detail::fixed6(s.final_longrun_avg);
            if (info.experiment.feedback == cobrah::FeedbackMode::Full) {
                std::cout << ", enrollment " << cobrah::detail::fixed6(s.mean_enrollment);
            }
            std::cout << '\n';
        }
        std::cout << "wrote " << files.size() << " files to " << out_dir << '\n';
    } catch (const std::exception& e) {
        return fail(kRuntime, e.what());
    }
    return kOk;
}

struct FitArgs {
    std::string input;
    std::string out;
    std::size_t grid = 5;
    std::size_t min_visits = 6;
    std::string q1_range = "0,1";
};

int cmd_fit(const FitArgs& a) {
    std::vector<cobrah::PatientHistoryRecord> records;
    cobrah::FitBox box;
    try {
        if (a.grid < 2) throw cobrah::Error(cobrah::ErrorCode::ConfigError, "--grid must be >= 2");
        box.q1 = cobrah::detail::parse_interval("--q1-range", a.q1_range);
        records = cobrah::filter_min_visits(cobrah::parse_history_csv(a.input), a.min_visits);
        if (records.empty()) {
            throw cobrah::Error(cobrah::ErrorCode::EmptyHistory,
                                a.input + " has no patients with at least " + std::to_string(a.min_visits) + " visits");
        }
    } catch (const std::exception& e) {
        return fail(kBadInput, e.what());
    }
    try {
        std::vector<cobrah::FittedPatient> fitted(records.size());
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex mu;
        auto worker = [&] {
            for (std::size_t k; (k = next.fetch_add(1)) < records.size();) {
                try {
                    fitted[k] = cobrah::fit_patient_grid(records[k], a.grid, box);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!failure) failure = std::current_exception();
                    next = records.size();
                }
            }
        };
        {
            std::vector<std::jthread> pool;
            const std::size_t n = std::min(cobrah::worker_count(0), records.size());
            for (std::size_t k = 0; k < n; ++k) pool.emplace_back(worker);
        }
        if (failure) std::rethrow_exception(failure);
        std::ostringstream os;
        cobrah::write_fitted_cohort(os, fitted);
        cobrah::write_file_atomic(a.out, os.str());
        std::cout << "fitted " << fitted.size() << " patients to " << a.out << '\n';
    } catch (const std::exception& e) {
        return fail(kRuntime, e.what());
    }
    return kOk;
}

int cmd_report(const std::string& run) {
    try {
        const auto names = cobrah::write_report(run);
        std::cout << "wrote";
        for (const auto& n : names) std::cout << ' ' << n;
        std::cout << " to " << run << '\n';
    } catch (const cobrah::Error& e) {
        return fail(is_input_error(e.code()) ? kBadInput : kRuntime, e.what());
    } catch (const std::exception& e) {
        return fail(kRuntime, e.what());
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonstationary combinatorial bandit simulator"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "run an experiment and write metrics");
    simulate->add_option("--config", sim.config, "config file")->required();
    simulate->add_option("--set", sim.overrides, "override, section.key=value (repeatable)");
    simulate->add_option("--seed", sim.seed, "base seed override");
    simulate->add_option("--out", sim.out, "output directory");

    FitArgs fit;
    auto* fitc = app.add_subcommand("fit", "grid-fit patient parameters from a history CSV");
    fitc->add_option("--input", fit.input, "history CSV")->required();
    fitc->add_option("--out", fit.out, "fitted cohort CSV")->required();
    fitc->add_option("--grid", fit.grid, "lattice points per axis")->capture_default_str();
    fitc->add_option("--min-visits", fit.min_visits, "drop patients with fewer visits")->capture_default_str();
    fitc->add_option("--q1-range", fit.q1_range, "search interval for q1 as lo,hi")->capture_default_str();

    std::string run_dir;
    auto* report = app.add_subcommand("report", "render SVG charts for a run directory");
    report->add_option("--run", run_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kBadInput;
    }
    if (*simulate) return cmd_simulate(sim);
    if (*fitc) return cmd_fit(fit);
    return cmd_report(run_dir);
}
