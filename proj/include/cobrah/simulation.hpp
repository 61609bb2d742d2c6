#ifndef COBRAH_SIMULATION_HPP
#define COBRAH_SIMULATION_HPP

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cohort.hpp"
#include "divergence.hpp"
#include "error.hpp"
#include "model.hpp"
#include "observation.hpp"
#include "policies.hpp"
#include "rng.hpp"
#include "selection.hpp"

namespace cobrah {

enum class CohortKind { Synthetic, Enrollment, Fitted };

struct CohortConfig {
    CohortKind kind = CohortKind::Synthetic;
    std::size_t arms = 20;
    std::optional<std::uint64_t> seed;  // defaults to the experiment seed
    std::string file;                   // fitted cohort CSV
    SyntheticCohortSpec synthetic;      // ranges (arms/seed taken from above)
    FitBox box;                         // ranges for the enrollment-style generator
};

struct ExperimentConfig {
    std::size_t horizon = 600;
    CohortConfig cohort;
    std::optional<std::size_t> capacity;
    std::optional<double> budget_fraction;
    FeedbackMode feedback = FeedbackMode::SemiBandit;
    std::vector<std::string> policies{"cobrah-tuned"};
    PolicyOptions options;
    RewardModelSpec reward_model;
    std::size_t replications = 1;
    std::uint64_t seed = 1;
    std::size_t burn_in = 30;
    std::size_t reward_window = 200;
    std::size_t enrollment_window = 5;
    std::size_t threads = 0;  // 0: COBRAH_THREADS, else hardware
};

inline std::vector<ArmSpec> build_cohort(const ExperimentConfig& cfg) {
    const std::uint64_t seed = cfg.cohort.seed.value_or(cfg.seed);
    std::vector<ArmSpec> arms;
    switch (cfg.cohort.kind) {
    case CohortKind::Synthetic: {
        SyntheticCohortSpec spec = cfg.cohort.synthetic;
        spec.arms = cfg.cohort.arms;
        spec.seed = seed;
        arms = generate_synthetic_cohort(spec, cfg.reward_model);
        break;
    }
    case CohortKind::Enrollment:
        arms = generate_enrollment_cohort(cfg.cohort.arms, seed, cfg.cohort.box, cfg.reward_model);
        break;
    case CohortKind::Fitted:
        if (cfg.cohort.file.empty()) throw Error(ErrorCode::ConfigError, "fitted cohort needs cohort.file");
        arms = read_fitted_cohort(cfg.cohort.file, cfg.reward_model);
        if (arms.empty()) throw Error(ErrorCode::ConfigError, "cohort file " + cfg.cohort.file + " has no patients");
        break;
    }
    return arms;
}

/// C = max(1, round(fraction * m)) when a budget fraction is given.
inline std::size_t resolve_capacity(const ExperimentConfig& cfg, std::size_t arms) {
    if (cfg.capacity && cfg.budget_fraction) {
        throw Error(ErrorCode::ConfigError, "set either capacity or budget, not both");
    }
    if (cfg.budget_fraction) {
        const double f = *cfg.budget_fraction;
        if (!(f > 0.0 && f <= 1.0)) throw Error(ErrorCode::ConfigError, "budget fraction must lie in (0, 1]");
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(f * static_cast<double>(arms))));
    }
    if (!cfg.capacity) throw Error(ErrorCode::ConfigError, "capacity or budget is required");
    return *cfg.capacity;
}

inline void validate(const ExperimentConfig& cfg, std::size_t arms) {
    const std::size_t c = resolve_capacity(cfg, arms);
    if (c == 0) throw Error(ErrorCode::ConfigError, "capacity must be >= 1");
    if (c > arms) throw Error(ErrorCode::ConfigError, "capacity exceeds the number of arms");
    if (cfg.replications == 0) throw Error(ErrorCode::ConfigError, "replications must be >= 1");
    if (cfg.horizon < initialization_rounds(arms, c)) {
        throw Error(ErrorCode::ConfigError, "horizon is shorter than the initialization phase");
    }
    if (cfg.policies.empty()) throw Error(ErrorCode::ConfigError, "at least one policy is required");
    if (cfg.reward_window == 0 || cfg.enrollment_window == 0) {
        throw Error(ErrorCode::ConfigError, "rolling windows must be >= 1");
    }
    for (const auto& a : std::span<const std::string>(cfg.policies)) {
        if (std::find(known_policy_ids().begin(), known_policy_ids().end(), a) == known_policy_ids().end()) {
            throw Error(ErrorCode::ConfigError, "unknown policy: " + a);
        }
    }
}

// ---------------------------------------------------------------- oracle

/// Greedy full-information choice from the oracle's own states. SB: top-C of
/// the current means. FF: select_ff on the one-step-ahead means under both
/// actions. States then advance under the chosen action.
struct OracleStep {
    SuperArm chosen;
    std::vector<double> means;  // every arm's mean this round, before the action
    double aggregate = 0.0;     // SB: sum over chosen; FF: sum over all arms
};

inline OracleStep oracle_step(std::span<const ArmSpec> arms, std::vector<StateVec>& states, std::size_t capacity,
                              FeedbackMode mode) {
    const std::size_t m = arms.size();
    OracleStep out;
    out.means.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.means[i] = mean_reward(arms[i].reward_model, arms[i].theta, states[i]);
    if (mode == FeedbackMode::Full) {
        std::vector<ActionValues> v(m);
        for (std::size_t i = 0; i < m; ++i) {
            const auto& a = arms[i];
            v[i] = {mean_reward(a.reward_model, a.theta, step_dynamics(a.dynamics, states[i], 1)),
                    mean_reward(a.reward_model, a.theta, step_dynamics(a.dynamics, states[i], 0))};
        }
        out.chosen = select_ff(v, capacity);
    } else {
        out.chosen = select_top_c(out.means, capacity);
    }
    for (std::size_t i = 0; i < m; ++i) {
        const bool on = out.chosen.contains(i);
        if (mode == FeedbackMode::Full || on) out.aggregate += out.means[i];
        states[i] = step_dynamics(arms[i].dynamics, states[i], on ? 1 : 0);
    }
    return out;
}

// ---------------------------------------------------------------- episode

struct RoundRecord {
    std::size_t round = 0;
    SuperArm chosen;
    std::vector<double> means;               // policy trajectory, before this round's action
    std::vector<int> rewards;                // sampled for every arm
    std::vector<std::uint8_t> observed;      // delivered to the policy
    SuperArm oracle_chosen;
    std::vector<double> oracle_means;
    double inst_regret = 0.0;                // signed
    double cum_regret = 0.0;
    double aggregate_reward = 0.0;           // realised: SB chosen arms, FF all arms
    double aggregate_mean = 0.0;             // expected counterpart
    std::size_t enrolled = 0;                // realised outcomes = 1 across all arms
};

struct Episode {
    std::string policy;
    std::size_t replication = 0;
    std::size_t capacity = 0;
    std::size_t init_rounds = 0;
    std::vector<RoundRecord> records;
    std::vector<StateVec> final_states;
};

/// One replication of one policy. Deterministic in (seed, replication): arm
/// rewards come from per-arm streams (one draw per arm per round) shared by
/// every policy, and the policy's own randomness from a separate stream.
inline Episode run_episode(const ExperimentConfig& cfg, std::span<const ArmSpec> arms, const std::string& policy_id,
                           std::size_t replication) {
    const std::size_t m = arms.size();
    validate(cfg, m);
    const std::size_t c = resolve_capacity(cfg, m);

    PolicyContext ctx;
    ctx.arms = m;
    ctx.capacity = c;
    ctx.feedback = cfg.feedback;
    ctx.reward_model = cfg.reward_model;
    for (const auto& a : arms) ctx.dynamics.push_back(a.dynamics);
    PolicyOptions opt = cfg.options;
    opt.horizon = cfg.horizon;
    opt.seed = derive_seed(cfg.seed, replication, 0, StreamPurpose::Policy);
    auto policy = make_policy(policy_id, ctx, opt);

    std::vector<Rng> reward_rng;
    for (std::size_t i = 0; i < m; ++i) reward_rng.push_back(make_stream(cfg.seed, replication, i, StreamPurpose::Reward));

    Episode ep;
    ep.policy = policy->name();
    ep.replication = replication;
    ep.capacity = c;
    ep.init_rounds = initialization_rounds(m, c);
    ep.records.reserve(cfg.horizon);

    std::vector<StateVec> x(m), ox(m);
    for (std::size_t i = 0; i < m; ++i) x[i] = ox[i] = arms[i].x0;
    std::vector<std::optional<int>> feedback(m);
    double cum = 0.0;
    for (std::size_t t = 1; t <= cfg.horizon; ++t) {
        RoundRecord r;
        r.round = t;
        r.chosen = policy->select(t);
        r.means.resize(m);
        r.rewards.resize(m);
        r.observed.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            const bool on = r.chosen.contains(i);
            r.means[i] = mean_reward(arms[i].reward_model, arms[i].theta, x[i]);
            r.rewards[i] = sample_reward(reward_rng[i], r.means[i]);
            r.observed[i] = (cfg.feedback == FeedbackMode::Full || on) ? 1 : 0;
            feedback[i] = r.observed[i] ? std::optional<int>(r.rewards[i]) : std::nullopt;
            r.enrolled += static_cast<std::size_t>(r.rewards[i]);
            if (cfg.feedback == FeedbackMode::Full || on) {
                r.aggregate_reward += r.rewards[i];
                r.aggregate_mean += r.means[i];
            }
            x[i] = step_dynamics(arms[i].dynamics, x[i], on ? 1 : 0);
        }
        policy->observe(t, feedback);

        auto o = oracle_step(arms, ox, c, cfg.feedback);
        r.oracle_chosen = std::move(o.chosen);
        r.oracle_means = std::move(o.means);
        r.inst_regret = o.aggregate - r.aggregate_mean;
        cum += r.inst_regret;
        r.cum_regret = cum;
        ep.records.push_back(std::move(r));
    }
    ep.final_states = x;
    return ep;
}

// ---------------------------------------------------------------- metrics

/// Trailing mean over the last min(window, k) values at each position k.
inline std::vector<double> rolling_average(std::span<const double> v, std::size_t window) {
    if (window == 0) throw Error(ErrorCode::ConfigError, "window must be >= 1");
    std::vector<double> out(v.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        sum += v[k];
        if (k >= window) sum -= v[k - window];
        out[k] = sum / static_cast<double>(std::min(window, k + 1));
    }
    return out;
}

/// Gaps between consecutive pull rounds, e.g. (3, 5, 10) -> (2, 5).
inline std::vector<std::size_t> visit_intervals(std::span<const std::size_t> pull_rounds) {
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k < pull_rounds.size(); ++k) out.push_back(pull_rounds[k] - pull_rounds[k - 1]);
    return out;
}

struct EpisodeMetrics {
    std::string policy;
    std::size_t replication = 0;
    std::vector<double> inst_regret, cum_regret;
    std::vector<double> reward, cum_reward, longrun_avg, rolling_avg;
    std::vector<double> enrolled_count, enrolled_frac, rolling_enrollment;
    std::vector<std::size_t> visits;                    // per arm, after initialization
    std::vector<std::vector<std::size_t>> intervals;    // per arm, after initialization
};

inline EpisodeMetrics summarize_episode(const Episode& ep, std::size_t arms, const ExperimentConfig& cfg) {
    EpisodeMetrics mtr;
    mtr.policy = ep.policy;
    mtr.replication = ep.replication;
    double cum = 0.0;
    std::vector<std::vector<std::size_t>> pulls(arms);
    for (const auto& r : ep.records) {
        mtr.inst_regret.push_back(r.inst_regret);
        mtr.cum_regret.push_back(r.cum_regret);
        mtr.reward.push_back(r.aggregate_reward);
        cum += r.aggregate_reward;
        mtr.cum_reward.push_back(cum);
        mtr.longrun_avg.push_back(cum / static_cast<double>(r.round));
        mtr.enrolled_count.push_back(static_cast<double>(r.enrolled));
        mtr.enrolled_frac.push_back(static_cast<double>(r.enrolled) / static_cast<double>(arms));
        if (r.round > ep.init_rounds) {
            for (auto i : r.chosen.members()) pulls[i].push_back(r.round);
        }
    }
    mtr.rolling_avg = rolling_average(mtr.reward, cfg.reward_window);
    mtr.rolling_enrollment = rolling_average(mtr.enrolled_frac, cfg.enrollment_window);
    for (const auto& p : pulls) {
        mtr.visits.push_back(p.size());
        mtr.intervals.push_back(visit_intervals(p));
    }
    return mtr;
}

struct CurveSummary {
    std::vector<double> mean, sd;  // sd uses n-1; zero for a single replication
};

inline CurveSummary summarize_curves(const std::vector<const std::vector<double>*>& curves) {
    CurveSummary s;
    if (curves.empty()) return s;
    const std::size_t n = curves.front()->size();
    s.mean.assign(n, 0.0);
    s.sd.assign(n, 0.0);
    const double r = static_cast<double>(curves.size());
    for (std::size_t k = 0; k < n; ++k) {
        double sum = 0.0;
        for (const auto* c : curves) sum += (*c)[k];
        const double mu = sum / r;
        double ss = 0.0;
        for (const auto* c : curves) ss += ((*c)[k] - mu) * ((*c)[k] - mu);
        s.mean[k] = mu;
        s.sd[k] = curves.size() > 1 ? std::sqrt(ss / (r - 1.0)) : 0.0;
    }
    return s;
}

struct PolicySummary {
    std::string policy;  // id as configured
    std::string name;    // resolved name, e.g. cobrah-sb-tuned
    CurveSummary cum_regret, longrun_avg, enrolled_frac;
    double final_regret = 0.0;            // mean over replications
    double final_longrun_avg = 0.0;
    double mean_enrollment = 0.0;         // enrolled fraction after burn-in, mean over replications
    std::vector<double> mean_visits;      // per arm, mean over replications
};

struct MetricsBundle {
    std::size_t arms = 0;
    std::size_t capacity = 0;
    std::size_t init_rounds = 0;
    std::size_t horizon = 0;
    std::vector<EpisodeMetrics> episodes;  // policy-major, replication-minor
    std::vector<PolicySummary> summaries;  // in configured policy order

    const PolicySummary& summary(const std::string& policy) const {
        for (const auto& s : summaries) {
            if (s.policy == policy || s.name == policy) return s;
        }
        throw Error(ErrorCode::ConfigError, "no results for policy " + policy);
    }
};

/// Mean of `frac` over rounds after the burn-in (all rounds if the burn-in covers the horizon).
inline double mean_after_burn_in(std::span<const double> frac, std::size_t burn_in) {
    const std::size_t start = burn_in < frac.size() ? burn_in : 0;
    double s = 0.0;
    for (std::size_t k = start; k < frac.size(); ++k) s += frac[k];
    return frac.size() > start ? s / static_cast<double>(frac.size() - start) : 0.0;
}

/// Worker count: explicit setting, else COBRAH_THREADS, else hardware (0 means auto).
inline std::size_t worker_count(std::size_t requested) {
    std::size_t n = requested;
    if (n == 0) {
        if (const char* env = std::getenv("COBRAH_THREADS")) n = static_cast<std::size_t>(std::strtoull(env, nullptr, 10));
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

/// Runs every (policy, replication) pair in parallel; results are assembled in
/// a fixed order so output does not depend on scheduling.
inline MetricsBundle run_experiment(const ExperimentConfig& cfg) {
    const auto arms = build_cohort(cfg);
    validate(cfg, arms.size());
    const std::size_t c = resolve_capacity(cfg, arms.size());

    const std::size_t jobs = cfg.policies.size() * cfg.replications;
    std::vector<std::optional<EpisodeMetrics>> results(jobs);
    std::vector<std::string> names(cfg.policies.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t job = next.fetch_add(1);
            if (job >= jobs) return;
            const std::size_t p = job / cfg.replications, rep = job % cfg.replications;
            try {
                auto ep = run_episode(cfg, arms, cfg.policies[p], rep);
                if (rep == 0) names[p] = ep.policy;
                results[job] = summarize_episode(ep, arms.size(), cfg);
            } catch (const Error& e) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::make_exception_ptr(
                        Error(e.code(), std::string(e.what()) + " (policy " + cfg.policies[p] + ", replication " +
                                            std::to_string(rep) + ")"));
                }
                next = jobs;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = jobs;
            }
        }
    };
    const std::size_t workers = std::min(worker_count(cfg.threads), jobs);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    MetricsBundle out;
    out.arms = arms.size();
    out.capacity = c;
    out.init_rounds = initialization_rounds(arms.size(), c);
    out.horizon = cfg.horizon;
    for (auto& r : results) out.episodes.push_back(std::move(*r));
    for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
        PolicySummary s;
        s.policy = cfg.policies[p];
        s.name = names[p];
        std::vector<const std::vector<double>*> regret, lra, enr;
        s.mean_visits.assign(arms.size(), 0.0);
        for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
            const auto& e = out.episodes[p * cfg.replications + rep];
            regret.push_back(&e.cum_regret);
            lra.push_back(&e.longrun_avg);
            enr.push_back(&e.enrolled_frac);
            s.mean_enrollment += mean_after_burn_in(e.enrolled_frac, cfg.burn_in);
            for (std::size_t i = 0; i < arms.size(); ++i) s.mean_visits[i] += static_cast<double>(e.visits[i]);
        }
        const double r = static_cast<double>(cfg.replications);
        s.mean_enrollment /= r;
        for (auto& v : s.mean_visits) v /= r;
        s.cum_regret = summarize_curves(regret);
        s.longrun_avg = summarize_curves(lra);
        s.enrolled_frac = summarize_curves(enr);
        s.final_regret = s.cum_regret.mean.back();
        s.final_longrun_avg = s.longrun_avg.mean.back();
        out.summaries.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------- regret bounds

struct RegretBoundInputs {
    std::size_t arms = 0;
    std::size_t capacity = 0;
    double super_arms = 0.0;      // |S|
    double reward_lipschitz = 0;  // L_g
    double diameter = 0.0;        // diam(X x Theta)
    double delta_min = 0.0;       // delta_min, or delta-bar_min for the full-feedback variant
};

/// C L_g diam |S| (4 B(ceil(m/C)^-4)^2 log n / delta^2 + m^2 pi^2 / 3).
inline double theorem2_bound(const RegretBoundInputs& in, const ConcentrationConfig& cfg, double horizon) {
    if (!(in.delta_min > 0.0)) throw Error(ErrorCode::InvalidBound, "delta_min must be > 0");
    if (in.capacity == 0 || in.arms == 0) throw Error(ErrorCode::InvalidBound, "arms and capacity must be >= 1");
    if (!(horizon >= 1.0)) throw Error(ErrorCode::InvalidBound, "horizon must be >= 1");
    const double blocks = static_cast<double>(initialization_rounds(in.arms, in.capacity));
    if (blocks < 2.0) throw Error(ErrorCode::InvalidBound, "ceil(m/C) = 1 leaves B undefined");
    const double b = concentration_b(cfg, std::pow(blocks, -4.0));
    const double m = static_cast<double>(in.arms);
    return static_cast<double>(in.capacity) * in.reward_lipschitz * in.diameter * in.super_arms *
           (4.0 * b * b * std::log(horizon) / (in.delta_min * in.delta_min) + m * m * std::numbers::pi * std::numbers::pi / 3.0);
}

/// Full-feedback variant: same form with delta-bar_min in place of delta_min.
inline double corollary2_bound(const RegretBoundInputs& in, const ConcentrationConfig& cfg, double horizon) {
    return theorem2_bound(in, cfg, horizon);
}

/// Number of non-empty super-arms of size at most C.
inline double count_super_arms(std::size_t arms, std::size_t capacity) {
    double total = 0.0, binom = 1.0;
    for (std::size_t k = 1; k <= std::min(arms, capacity); ++k) {
        binom = binom * static_cast<double>(arms - k + 1) / static_cast<double>(k);
        total += binom;
    }
    return total;
}

struct GapResult {
    double delta_gap = 0.0;  // Delta_min
    double delta_kl = 0.0;   // delta_min
};

/// Evaluates Delta_min and delta_min by enumeration under a fixed sequence of
/// super-arms: per round, the best super-arm sum against the best strictly
/// worse one; then the smallest (1/T_{i,t-1}) D_i(arm i || arm j) over pairs
/// whose means differ by at least Delta_min / (2m), with D_i summed over arm
/// i's pulled rounds before t under arm i's dynamics.
inline GapResult brute_force_delta_min(std::span<const ArmSpec> arms, std::span<const SuperArm> plays,
                                       std::size_t capacity) {
    const std::size_t m = arms.size();
    if (m > 4 || plays.size() > 20) throw Error(ErrorCode::TooLarge, "at most 4 arms and 20 rounds");
    if (m == 0 || plays.empty()) throw Error(ErrorCode::ConfigError, "empty instance");
    detail::check_capacity(m, capacity);
    const std::size_t n = plays.size();

    // Means per arm per round along the fixed sequence; actions per arm.
    std::vector<std::vector<double>> g(m, std::vector<double>(n));
    std::vector<std::vector<Action>> y(m, std::vector<Action>(n));
    for (std::size_t i = 0; i < m; ++i) {
        StateVec x = arms[i].x0;
        for (std::size_t t = 0; t < n; ++t) {
            y[i][t] = plays[t].contains(i) ? 1 : 0;
            g[i][t] = mean_reward(arms[i].reward_model, arms[i].theta, x);
            x = step_dynamics(arms[i].dynamics, x, y[i][t]);
        }
    }

    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
        std::vector<double> sums;
        for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
            if (static_cast<std::size_t>(std::popcount(mask)) > capacity) continue;
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (mask & (1u << i)) s += g[i][t];
            }
            sums.push_back(s);
        }
        const double best = *std::max_element(sums.begin(), sums.end());
        double second = -std::numeric_limits<double>::infinity();
        for (double s : sums) {
            if (s < best) second = std::max(second, s);
        }
        if (std::isfinite(second)) gap = std::min(gap, best - second);
    }
    if (!std::isfinite(gap) || !(gap > 0.0)) throw Error(ErrorCode::GapDegenerate, "no suboptimal super-arm");

    const double threshold = gap / (2.0 * static_cast<double>(m));
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<std::size_t> pulled;
            for (std::size_t s = 0; s < t; ++s) {
                if (y[i][s]) pulled.push_back(s + 1);
            }
            if (pulled.empty()) continue;
            for (std::size_t j = 0; j < m; ++j) {
                if (j == i || std::abs(g[i][t] - g[j][t]) < threshold) continue;
                const double d = trajectory_kl({arms[i].theta, arms[i].x0}, {arms[j].theta, arms[j].x0},
                                               std::span<const Action>(y[i]).first(t), pulled, arms[i].dynamics,
                                               arms[i].reward_model);
                dmin = std::min(dmin, d / static_cast<double>(pulled.size()));
            }
        }
    }
    if (!std::isfinite(dmin)) throw Error(ErrorCode::GapDegenerate, "no arm pair qualifies for delta_min");
    return {gap, dmin};
}

}  // namespace cobrah

#endif
