#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include <cobrah/config.hpp>
#include <cobrah/report.hpp>

using namespace cobrah;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(COBRAH_SOURCE_DIR) / "configs";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cobrah_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct Result {
    int code;
    std::string output;
};

Result run_cli(const std::string& args) {
    const fs::path log = fs::temp_directory_path() / "cobrah_test_cli.log";
    const std::string cmd = std::string(COBRAH_CLI) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(log)};
}

std::size_t data_rows(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) ++n;
    return n == 0 ? 0 : n - 1;
}

ExperimentConfig from_text(const std::string& text) { return to_experiment_config(parse_config_text(text)); }

}  // namespace

// ---------------------------------------------------------------- config

TEST(Config, SectionsCommentsAndTypes) {
    const auto cfg = from_text(
        "# leading comment\n"
        "horizon = 50   # trailing comment\n"
        "feedback = ff\n"
        "budget = 0.25\n"
        "policies = cobrah-tuned, random\n"
        "[cohort]\n"
        "kind = enrollment\n"
        "arms = 8\n"
        "box_q1 = -1, 0\n"
        "[cobrah]\n"
        "eta = 0.5\n"
        "max_iterations = 20\n"
        "[sw-ucb]\n"
        "window = 4\n");
    EXPECT_EQ(cfg.horizon, 50u);
    EXPECT_EQ(cfg.feedback, FeedbackMode::Full);
    EXPECT_EQ(cfg.budget_fraction, 0.25);
    EXPECT_EQ(cfg.policies, (std::vector<std::string>{"cobrah-tuned", "random"}));
    EXPECT_EQ(cfg.cohort.kind, CohortKind::Enrollment);
    EXPECT_EQ(cfg.cohort.arms, 8u);
    EXPECT_EQ(cfg.cohort.box.q1.lo, -1.0);
    EXPECT_EQ(cfg.options.cobrah.tuned.eta, 0.5);
    EXPECT_EQ(cfg.options.cobrah.mle_solver.max_iterations, 20u);
    EXPECT_EQ(cfg.options.cobrah.ucb_solver.max_iterations, 20u);
    EXPECT_EQ(cfg.options.window, 4u);
}

TEST(Config, ParseErrorsCarryLineNumbers) {
    try {
        parse_config_text("horizon = 5\n[cohort\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(parse_config_text("horizon 5\n"), ParseError);
    EXPECT_THROW(parse_config_text("horizon = 5\nhorizon = 6\n"), ParseError);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW(from_text("horizn = 5\n"), Error);
    EXPECT_THROW(from_text("horizon = -5\n"), Error);
    EXPECT_THROW(from_text("horizon = 5x\n"), Error);
    EXPECT_THROW(from_text("feedback = bandit\n"), Error);
    EXPECT_THROW(from_text("[cohort]\ndecay = 1, 0.5\n"), Error);
    EXPECT_THROW(from_text("[cobrah]\neta = 0\n"), Error);
    EXPECT_THROW(from_text("[cobrah]\nlattice = 2.5\n"), Error);
    EXPECT_THROW(from_text("[sw-ucb]\nwindow = 0\n"), Error);
}

TEST(Config, Overrides) {
    auto doc = parse_config_text("horizon = 5\n[cohort]\narms = 3\n");
    apply_override(doc, "cohort.arms=9");
    apply_override(doc, "seed = 4");
    const auto cfg = to_experiment_config(doc);
    EXPECT_EQ(cfg.cohort.arms, 9u);
    EXPECT_EQ(cfg.seed, 4u);
    EXPECT_THROW(apply_override(doc, "no-equals"), Error);
    EXPECT_EQ(doc.canonical(), "cohort.arms = 9\nexperiment.horizon = 5\nexperiment.seed = 4\n");
}

TEST(Config, MissingFile) {
    try {
        (void)load_config("/nonexistent/run.cfg");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigError);
        EXPECT_NE(std::string(e.what()).find("/nonexistent/run.cfg"), std::string::npos);
    }
}

TEST(Config, SampleConfigsValidate) {
    for (const char* name : {"tiny.cfg", "sb_desk.cfg", "ff_enrollment.cfg"}) {
        const auto cfg = to_experiment_config(load_config((kConfigs / name).string()));
        const auto arms = build_cohort(cfg);
        EXPECT_NO_THROW(validate(cfg, arms.size())) << name;
    }
}

// ---------------------------------------------------------------- hashing and CSV

TEST(Hash, GitBlobConvention) {
    // `printf 'hello\n' | git hash-object --stdin`
    EXPECT_EQ(git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
    EXPECT_EQ(sha1_hex("abc"), "a9993e364706816aba3e25717850c26c9cd0d89d");
}

TEST(Csv, HeadersAndFixedDecimals) {
    auto cfg = from_text("horizon = 6\ncapacity = 1\npolicies = cucb, random\n[cohort]\narms = 3\n");
    cfg.replications = 2;
    const auto b = run_experiment(cfg);
    const auto regret = regret_csv(b);
    EXPECT_EQ(regret.substr(0, regret.find('\n')), "round,policy,replication,inst_regret,cum_regret");
    std::istringstream in(regret);
    std::string line;
    std::getline(in, line);
    long last_round = 0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        const auto f = detail::split_commas(line);
        ASSERT_EQ(f.size(), 5u);
        const long round = std::stol(std::string(f[0]));
        EXPECT_GE(round, last_round);
        last_round = round;
        for (auto v : {f[3], f[4]}) EXPECT_EQ(v.size() - v.find('.') - 1, 6u) << v;
    }
    EXPECT_EQ(rows, 6u * 2u * 2u);
    EXPECT_EQ(reward_csv(b).substr(0, 55), "round,policy,replication,cum_reward,longrun_avg,rolling");
    EXPECT_EQ(visits_csv(b).substr(0, 23), "policy,arm,visit_count\n");
    EXPECT_EQ(intervals_csv(b).substr(0, 20), "policy,arm,interval\n");
    EXPECT_EQ(enrollment_csv(b).substr(0, 63), "round,policy,replication,enrolled_count,enrolled_frac,rolling5\n");
}

TEST(Report, MissingAndEmptyFiles) {
    const auto dir = scratch("report_missing");
    const auto cfg = from_text("horizon = 8\ncapacity = 1\npolicies = cucb\n[cohort]\narms = 3\n");
    RunInfo info{parse_config_text("horizon = 8\n"), cfg, {}, {}};
    write_run(dir, info, run_experiment(cfg));
    EXPECT_EQ(write_report(dir).size(), 5u);

    fs::remove(dir / "reward.csv");
    try {
        write_report(dir);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigError);
        EXPECT_NE(std::string(e.what()).find("reward.csv"), std::string::npos);
    }
    std::ofstream(dir / "reward.csv") << "round,policy,replication,cum_reward,longrun_avg,rolling_avg\n";
    EXPECT_THROW(write_report(dir), Error);
}

// ---------------------------------------------------------------- CLI

TEST(Cli, MissingConfigExitsTwo) {
    const auto r = run_cli("simulate --config /nonexistent/x.cfg --out /tmp/cobrah_test_never");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("/nonexistent/x.cfg"), std::string::npos);
}

TEST(Cli, BadOverrideAndUsageExitTwo) {
    EXPECT_EQ(run_cli("simulate --config " + (kConfigs / "tiny.cfg").string() + " --set cohort.nope=1").code, 2);
    EXPECT_EQ(run_cli("simulate --config " + (kConfigs / "tiny.cfg").string() + " --set capacity=9").code, 2);
    EXPECT_EQ(run_cli("bogus").code, 2);
    EXPECT_EQ(run_cli("").code, 2);
}

TEST(Cli, TinySimulationAndReport) {
    const auto out = scratch("tiny");
    const auto r = run_cli("simulate --config " + (kConfigs / "tiny.cfg").string() + " --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.output;
    for (const char* f : {"regret.csv", "reward.csv", "enrollment.csv", "visits.csv", "intervals.csv", "manifest.json"}) {
        EXPECT_TRUE(fs::exists(out / f)) << f;
    }
    EXPECT_EQ(data_rows(out / "regret.csv"), 20u);
    const auto manifest = nlohmann::json::parse(read_file(out / "manifest.json"));
    EXPECT_EQ(manifest.at("files").size(), 5u);
    EXPECT_EQ(manifest.at("seeds").at("base").get<std::uint64_t>(), 7u);

    const auto rep = run_cli("report --run " + out.string());
    ASSERT_EQ(rep.code, 0) << rep.output;
    for (const char* f : {"regret.svg", "reward.svg", "enrollment.svg", "visit_hist.svg", "interval_hist.svg"}) {
        const auto svg = read_file(out / f);
        EXPECT_EQ(svg.rfind("<svg", 0), 0u) << f;
        EXPECT_NE(svg.find("cobrah-sb-tuned"), std::string::npos) << f;
    }
}

TEST(Cli, RerunsAreByteIdenticalAndSeedMatters) {
    const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
    const std::string cfg = (kConfigs / "tiny.cfg").string() + " --set policies=cobrah-tuned,cucb,random";
    ASSERT_EQ(run_cli("simulate --config " + cfg + " --out " + a.string()).code, 0);
    ASSERT_EQ(run_cli("simulate --config " + cfg + " --out " + b.string()).code, 0);
    ASSERT_EQ(run_cli("simulate --config " + cfg + " --seed 8 --out " + c.string()).code, 0);
    for (const char* f : {"regret.csv", "reward.csv", "enrollment.csv", "visits.csv", "intervals.csv"}) {
        EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
    }
    EXPECT_NE(read_file(a / "regret.csv"), read_file(c / "regret.csv"));
    const auto ma = nlohmann::json::parse(read_file(a / "manifest.json"));
    const auto mc = nlohmann::json::parse(read_file(c / "manifest.json"));
    EXPECT_EQ(mc.at("seeds").at("base").get<std::uint64_t>(), 8u);
    EXPECT_NE(ma.at("config_hash"), mc.at("config_hash"));
}

TEST(Cli, TwoPolicyLegends) {
    const auto out = scratch("legend");
    ASSERT_EQ(run_cli("simulate --config " + (kConfigs / "tiny.cfg").string() +
                      " --set policies=cucb,random --set feedback=ff --out " + out.string())
                  .code,
              0);
    ASSERT_EQ(run_cli("report --run " + out.string()).code, 0);
    const auto svg = read_file(out / "regret.svg");
    EXPECT_NE(svg.find(">cucb<"), std::string::npos);
    EXPECT_NE(svg.find(">random<"), std::string::npos);
}

TEST(Cli, FitFixture) {
    const auto out = scratch("fit");
    const std::string input = (kConfigs / "sample_history.csv").string();
    ASSERT_EQ(run_cli("fit --input " + input + " --out " + (out / "a.csv").string() + " --grid 3").code, 0);
    ASSERT_EQ(run_cli("fit --input " + input + " --out " + (out / "b.csv").string() + " --grid 3").code, 0);
    EXPECT_EQ(data_rows(out / "a.csv"), 2u);
    EXPECT_EQ(read_file(out / "a.csv"), read_file(out / "b.csv"));

    // Fitted cohorts feed straight back into a simulation.
    const auto run = scratch("fit_run");
    ASSERT_EQ(run_cli("simulate --config " + (kConfigs / "tiny.cfg").string() + " --set cohort.kind=fitted --set cohort.file=" +
                      (out / "a.csv").string() + " --set horizon=10 --out " + run.string())
                  .code,
              0);
}

TEST(Cli, FitErrorsExitTwo) {
    const auto dir = scratch("fit_err");
    std::ofstream(dir / "empty.csv") << "patient_id,period,visited,enrolled\n";
    std::ofstream(dir / "bad.csv") << "patient_id,period,visited,enrolled\n1,1,3,0\n";
    EXPECT_EQ(run_cli("fit --input " + (dir / "empty.csv").string() + " --out " + (dir / "o.csv").string()).code, 2);
    EXPECT_EQ(run_cli("fit --input " + (dir / "bad.csv").string() + " --out " + (dir / "o.csv").string()).code, 2);
    EXPECT_EQ(run_cli("fit --input /nonexistent.csv --out " + (dir / "o.csv").string()).code, 2);
}

TEST(Cli, ReportOnMissingRunExitsTwo) {
    const auto dir = scratch("report_empty");
    const auto r = run_cli("report --run " + dir.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("manifest.json"), std::string::npos);
}
