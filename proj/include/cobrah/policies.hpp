#ifndef COBRAH_POLICIES_HPP
#define COBRAH_POLICIES_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "divergence.hpp"
#include "error.hpp"
#include "estimation.hpp"
#include "model.hpp"
#include "observation.hpp"
#include "rng.hpp"
#include "selection.hpp"

namespace cobrah {

/// Everything a policy may know about the problem before play starts. The
/// per-arm dynamics are known to the learner; (theta, x0) are not.
struct PolicyContext {
    std::size_t arms = 0;
    std::size_t capacity = 1;
    FeedbackMode feedback = FeedbackMode::SemiBandit;
    std::vector<DynamicsSpec> dynamics;
    RewardModelSpec reward_model;
};

struct PolicyTrace {
    std::vector<SuperArm> chosen;            // one per elapsed round
    std::vector<std::size_t> pulls;          // cumulative per arm
    std::vector<std::vector<double>> index;  // per-round per-arm UCB (FF: UCB gain), empty if not applicable
};

inline std::size_t initialization_rounds(std::size_t arms, std::size_t capacity) {
    return (arms + capacity - 1) / capacity;
}

/// Round t (1-based) of the initialization phase: consecutive blocks of `capacity` indices.
inline SuperArm initialization_block(std::size_t t, std::size_t arms, std::size_t capacity) {
    std::vector<std::size_t> block;
    for (std::size_t i = (t - 1) * capacity; i < std::min(t * capacity, arms); ++i) block.push_back(i);
    return SuperArm(std::move(block));
}

class Policy {
  public:
    explicit Policy(PolicyContext ctx) : ctx_(std::move(ctx)) {
        detail::check_capacity(ctx_.arms, ctx_.capacity);
        trace_.pulls.assign(ctx_.arms, 0);
    }
    virtual ~Policy() = default;
    Policy(const Policy&) = delete;
    Policy& operator=(const Policy&) = delete;

    virtual std::string name() const = 0;

    SuperArm select(std::size_t t) {
        if (t != trace_.chosen.size() + 1) throw Error(ErrorCode::OrderError, "rounds must be selected in order");
        SuperArm s = choose(t);
        if (!s.fits(ctx_.arms, ctx_.capacity)) throw Error(ErrorCode::CapacityExceedsArms, name() + " exceeded capacity");
        for (auto i : s.members()) ++trace_.pulls[i];
        trace_.chosen.push_back(s);
        trace_.index.push_back(std::move(pending_index_));
        pending_index_.clear();
        return s;
    }

    /// Per-arm rewards for the round just played; nullopt where unobserved.
    void observe(std::size_t t, std::span<const std::optional<int>> rewards) {
        if (t != trace_.chosen.size() || rewards.size() != ctx_.arms) {
            throw Error(ErrorCode::OrderError, "feedback does not match the last selection");
        }
        update(t, trace_.chosen.back(), rewards);
    }

    const PolicyTrace& trace() const { return trace_; }
    const PolicyContext& context() const { return ctx_; }

  protected:
    virtual SuperArm choose(std::size_t t) = 0;
    virtual void update(std::size_t t, const SuperArm& played, std::span<const std::optional<int>> rewards) = 0;

    bool initializing(std::size_t t) const { return t <= initialization_rounds(ctx_.arms, ctx_.capacity); }
    SuperArm init_block(std::size_t t) const { return initialization_block(t, ctx_.arms, ctx_.capacity); }
    void record_index(std::vector<double> values) { pending_index_ = std::move(values); }

    PolicyContext ctx_;

  private:
    PolicyTrace trace_;
    std::vector<double> pending_index_;
};

// ---------------------------------------------------------------- COBRAH

enum class RadiusKind { Theoretical, Tuned };

/// Solver settings used inside the policies: exact gradients and warm starts
/// keep per-round refits cheap.
inline SolverConfig policy_solver_defaults() {
    SolverConfig cfg;
    cfg.gradient = GradientMode::Sensitivity;
    cfg.lattice_per_axis = 0;
    cfg.max_iterations = 60;
    cfg.penalty_rounds = 3;
    cfg.tolerance = 1e-6;
    return cfg;
}

struct CobrahConfig {
    RadiusKind radius = RadiusKind::Tuned;
    ConcentrationConfig concentration;
    TunedRadiusConfig tuned;
    SolverConfig mle_solver = policy_solver_defaults();
    SolverConfig ucb_solver = policy_solver_defaults();
    std::size_t first_fit_lattice = 3;  // lattice for an arm's first fit; later fits warm-start
};

class CobrahPolicy final : public Policy {
  public:
    CobrahPolicy(PolicyContext ctx, CobrahConfig cfg) : Policy(std::move(ctx)), cfg_(std::move(cfg)) {
        if (ctx_.dynamics.size() != ctx_.arms) throw Error(ErrorCode::ConfigError, "one dynamics spec per arm required");
        for (std::size_t i = 0; i < ctx_.arms; ++i) logs_.emplace_back(i);
        arms_.resize(ctx_.arms);
    }

    std::string name() const override {
        return std::string("cobrah-") + (ctx_.feedback == FeedbackMode::Full ? "ff" : "sb") + "-" +
               (cfg_.radius == RadiusKind::Tuned ? "tuned" : "theoretical");
    }

    const ObservationLog& log(std::size_t arm) const { return logs_.at(arm); }

  protected:
    SuperArm choose(std::size_t t) override {
        if (initializing(t)) return init_block(t);
        // SB scores each arm's current state; FF compares the next state
        // under a visit against the next state under rest.
        std::vector<double> values(ctx_.arms);
        if (ctx_.feedback == FeedbackMode::SemiBandit) {
            for (std::size_t i = 0; i < ctx_.arms; ++i) {
                refit(i);
                values[i] = ucb(i, t, std::nullopt);
            }
            SuperArm s = select_top_c(values, ctx_.capacity);
            record_index(std::move(values));
            return s;
        }
        std::vector<ActionValues> pairs(ctx_.arms);
        for (std::size_t i = 0; i < ctx_.arms; ++i) {
            refit(i);
            pairs[i] = {ucb(i, t, Action{1}), ucb(i, t, Action{0})};
            values[i] = pairs[i].gain();
        }
        record_index(std::move(values));
        return select_ff(pairs, ctx_.capacity);
    }

    void update(std::size_t, const SuperArm& played, std::span<const std::optional<int>> rewards) override {
        for (std::size_t i = 0; i < ctx_.arms; ++i) logs_[i].append(played.contains(i) ? 1 : 0, rewards[i]);
    }

  private:
    struct ArmState {
        std::optional<MleResult> mle;
        std::size_t fitted_on = 0;  // observed count at the last fit
        std::optional<Hypothesis> warm[3];  // rest, visit, current state
    };

    void refit(std::size_t i) {
        auto& a = arms_[i];
        const auto& log = logs_[i];
        if (a.mle && a.fitted_on == log.observed_count()) return;
        SolverConfig sc = cfg_.mle_solver;
        std::vector<Hypothesis> warm;
        if (a.mle) {
            warm.push_back(a.mle->estimate);
        } else {
            sc.lattice_per_axis = std::max(sc.lattice_per_axis, cfg_.first_fit_lattice);
        }
        a.mle = fit_mle(log, ctx_.dynamics[i], ctx_.reward_model, sc, warm);
        a.fitted_on = log.observed_count();
    }

    /// UCB of the mean at the current state, or one step ahead after `next`.
    double ucb(std::size_t i, std::size_t t, std::optional<Action> next) {
        auto& a = arms_[i];
        const auto& log = logs_[i];
        const std::size_t pulls = std::max<std::size_t>(log.pull_count(), 1);
        const double round = static_cast<double>(t);
        const ConfidenceRadius radius = cfg_.radius == RadiusKind::Tuned
                                            ? ConfidenceRadius::tuned(cfg_.tuned, round, pulls)
                                            : ConfidenceRadius::constant(radius_theoretical(cfg_.concentration, round, pulls));
        target_.assign(log.actions().begin(), log.actions().end());
        if (next) target_.push_back(*next);
        const std::size_t slot = next ? *next : 2;
        std::vector<Hypothesis> warm;
        if (a.warm[slot]) warm.push_back(*a.warm[slot]);
        const auto r = ucb_mean(log, *a.mle, target_, radius, ctx_.dynamics[i], ctx_.reward_model, cfg_.ucb_solver, warm);
        a.warm[slot] = r.argmax;
        return r.value;
    }

    CobrahConfig cfg_;
    std::vector<ObservationLog> logs_;
    std::vector<ArmState> arms_;
    std::vector<Action> target_;
};

// ---------------------------------------------------------------- index baselines

/// Sliding-window length max(1, min(ceil((m/C)^(1/3)), T)); T = 0 means no horizon cap.
inline std::size_t sw_window_size(std::size_t arms, std::size_t capacity, std::size_t horizon) {
    if (capacity == 0) throw Error(ErrorCode::ConfigError, "capacity must be >= 1");
    const double raw = std::cbrt(static_cast<double>(arms) / static_cast<double>(capacity));
    const auto w = static_cast<std::size_t>(std::ceil(raw - 1e-12));
    return std::max<std::size_t>(1, horizon == 0 ? w : std::min(w, horizon));
}

/// Running (or windowed) mean with a UCB bonus sqrt(3 ln t / (2 n)).
class RewardStats {
  public:
    explicit RewardStats(std::size_t window = 0) : window_(window) {}

    void add(int reward) {
        rewards_.push_back(reward);
        sum_ += reward;
        if (window_ > 0 && rewards_.size() > window_) {
            sum_ -= rewards_.front();
            rewards_.pop_front();
        }
    }

    std::size_t count() const { return rewards_.size(); }
    double mean() const { return rewards_.empty() ? 0.0 : static_cast<double>(sum_) / rewards_.size(); }

    double index(std::size_t t) const {
        if (rewards_.empty()) return std::numeric_limits<double>::infinity();
        const double log_t = std::log(std::max<double>(static_cast<double>(t), 1.0));
        return mean() + std::sqrt(3.0 * log_t / (2.0 * static_cast<double>(rewards_.size())));
    }

  private:
    std::size_t window_;
    std::deque<int> rewards_;
    long sum_ = 0;
};

/// CUCB (window = 0) and SW-UCB (window >= 1). Under full feedback the
/// statistics are kept per (arm, action) and arms are ranked by index gain.
class IndexPolicy final : public Policy {
  public:
    IndexPolicy(PolicyContext ctx, std::size_t window) : Policy(std::move(ctx)), window_(window) {
        for (std::size_t i = 0; i < ctx_.arms; ++i) stats_.push_back({RewardStats(window), RewardStats(window)});
    }

    std::string name() const override { return window_ == 0 ? "cucb" : "sw-ucb"; }
    std::size_t window() const { return window_; }

  protected:
    SuperArm choose(std::size_t t) override {
        if (initializing(t)) return init_block(t);
        std::vector<double> idx(ctx_.arms);
        if (ctx_.feedback == FeedbackMode::SemiBandit) {
            for (std::size_t i = 0; i < ctx_.arms; ++i) idx[i] = stats_[i][1].index(t);
            SuperArm s = select_top_c(idx, ctx_.capacity);
            record_index(std::move(idx));
            return s;
        }
        constexpr double inf = std::numeric_limits<double>::infinity();
        std::vector<ActionValues> pairs(ctx_.arms);
        for (std::size_t i = 0; i < ctx_.arms; ++i) {
            const auto& [rest, visit] = stats_[i];
            idx[i] = visit.index(t);
            if (visit.count() == 0) {
                pairs[i] = {inf, 0.0};
            } else if (rest.count() == 0) {
                pairs[i] = {0.0, inf};
            } else {
                pairs[i] = {visit.index(t), rest.index(t)};
            }
        }
        SuperArm s = select_ff(pairs, ctx_.capacity);
        record_index(std::move(idx));
        return s;
    }

    void update(std::size_t, const SuperArm& played, std::span<const std::optional<int>> rewards) override {
        for (std::size_t i = 0; i < ctx_.arms; ++i) {
            if (!rewards[i]) continue;
            stats_[i][played.contains(i) ? 1 : 0].add(*rewards[i]);
        }
    }

  private:
    std::size_t window_;
    std::vector<std::array<RewardStats, 2>> stats_;  // [rested, visited]
};

/// Uniform C-subset every round.
class RandomPolicy final : public Policy {
  public:
    RandomPolicy(PolicyContext ctx, Rng rng) : Policy(std::move(ctx)), rng_(std::move(rng)) {}
    std::string name() const override { return "random"; }

  protected:
    SuperArm choose(std::size_t) override {
        std::vector<std::size_t> pool(ctx_.arms);
        for (std::size_t i = 0; i < ctx_.arms; ++i) pool[i] = i;
        // Partial Fisher-Yates.
        for (std::size_t k = 0; k < ctx_.capacity; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, ctx_.arms - 1);
            std::swap(pool[k], pool[pick(rng_)]);
        }
        pool.resize(ctx_.capacity);
        return SuperArm(std::move(pool));
    }
    void update(std::size_t, const SuperArm&, std::span<const std::optional<int>>) override {}

  private:
    Rng rng_;
};

// ---------------------------------------------------------------- factory

struct PolicyOptions {
    CobrahConfig cobrah;
    std::optional<std::size_t> window;  // SW-UCB override
    std::size_t horizon = 0;            // for the default window
    std::uint64_t seed = 0;             // Random's stream
};

inline const std::vector<std::string>& known_policy_ids() {
    static const std::vector<std::string> ids{"cobrah-sb-theoretical", "cobrah-sb-tuned", "cobrah-ff-theoretical",
                                              "cobrah-ff-tuned", "cobrah-theoretical", "cobrah-tuned",
                                              "cucb", "sw-ucb", "random"};
    return ids;
}

/// Builds a policy by id. "cobrah-tuned"/"cobrah-theoretical" follow the
/// context's feedback mode; the mode-specific ids must agree with it.
inline std::unique_ptr<Policy> make_policy(std::string_view id, const PolicyContext& ctx, const PolicyOptions& opt) {
    if (id.starts_with("cobrah-")) {
        std::string_view rest = id.substr(7);
        std::optional<FeedbackMode> mode;
        if (rest.starts_with("sb-")) mode = FeedbackMode::SemiBandit;
        if (rest.starts_with("ff-")) mode = FeedbackMode::Full;
        if (mode) rest = rest.substr(3);
        if (mode && *mode != ctx.feedback) {
            throw Error(ErrorCode::ConfigError, std::string(id) + " does not match feedback mode " +
                                                    std::string(to_string(ctx.feedback)));
        }
        CobrahConfig cfg = opt.cobrah;
        if (rest == "tuned") {
            cfg.radius = RadiusKind::Tuned;
        } else if (rest == "theoretical") {
            cfg.radius = RadiusKind::Theoretical;
        } else {
            throw Error(ErrorCode::ConfigError, "unknown policy: " + std::string(id));
        }
        return std::make_unique<CobrahPolicy>(ctx, std::move(cfg));
    }
    if (id == "cucb") return std::make_unique<IndexPolicy>(ctx, 0);
    if (id == "sw-ucb") {
        const std::size_t w = opt.window.value_or(sw_window_size(ctx.arms, ctx.capacity, opt.horizon));
        if (w == 0) throw Error(ErrorCode::ConfigError, "window must be >= 1");
        return std::make_unique<IndexPolicy>(ctx, w);
    }
    if (id == "random") return std::make_unique<RandomPolicy>(ctx, Rng(opt.seed));
    throw Error(ErrorCode::ConfigError, "unknown policy: " + std::string(id));
}

}  // namespace cobrah

#endif
