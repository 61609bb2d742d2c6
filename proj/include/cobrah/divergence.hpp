#ifndef COBRAH_DIVERGENCE_HPP
#define COBRAH_DIVERGENCE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "error.hpp"
#include "model.hpp"
#include "observation.hpp"

namespace cobrah {

/// Second-argument probabilities are clipped to [kKlClip, 1 - kKlClip].
inline constexpr double kKlClip = 1e-9;

/// A candidate (theta, x0) for one arm; the learner knows the arm's dynamics.
struct Hypothesis {
    double theta = 0.0;
    StateVec x0;

    friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

namespace detail {

inline double xlogy_ratio(double p, double q) { return p > 0.0 ? p * std::log(p / q) : 0.0; }

inline double clip_probability(double q) { return std::clamp(q, kKlClip, 1.0 - kKlClip); }

}  // namespace detail

/// KL(Bern(p) || Bern(q)) with 0 ln 0 = 0.
inline double bernoulli_kl(double p, double q) {
    if (std::isnan(p) || std::isnan(q)) throw Error(ErrorCode::InvalidProbability, "NaN probability");
    if (p < 0.0 || p > 1.0) throw Error(ErrorCode::InvalidProbability, "p outside [0,1]");
    q = detail::clip_probability(q);
    const double kl = detail::xlogy_ratio(p, q) + detail::xlogy_ratio(1.0 - p, 1.0 - q);
    return std::max(kl, 0.0);
}

/// Sum over `observed_rounds` (1-based) of the per-round KL between the reward
/// distributions induced by `truth` and `alt` under the same action sequence.
/// Round r is scored at the state reached after the first r-1 actions.
inline double trajectory_kl(const Hypothesis& truth, const Hypothesis& alt, std::span<const Action> actions,
                            std::span<const std::size_t> observed_rounds, const DynamicsSpec& dyn,
                            const RewardModelSpec& model) {
    if (observed_rounds.empty()) throw Error(ErrorCode::EmptyHistory, "no observed rounds");
    std::size_t previous = 0;
    for (auto r : observed_rounds) {
        if (r == 0 || r > actions.size() || r < previous) {
            throw Error(ErrorCode::OrderError, "observed rounds must be sorted and within the action history");
        }
        previous = r;
    }
    StateVec x = truth.x0;
    StateVec xa = alt.x0;
    double total = 0.0;
    std::size_t next = 0;
    // Round s+1 is scored at the state before its own action.
    for (std::size_t s = 0; s < actions.size() && next < observed_rounds.size(); ++s) {
        while (next < observed_rounds.size() && observed_rounds[next] == s + 1) {
            total += bernoulli_kl(mean_reward(model, truth.theta, x), mean_reward(model, alt.theta, xa));
            ++next;
        }
        x = step_dynamics(dyn, x, actions[s]);
        xa = step_dynamics(dyn, xa, actions[s]);
    }
    return total;
}

/// Constants entering the concentration radius B(alpha).
struct ConcentrationConfig {
    double lipschitz_dynamics = 1.0;                 // L_f
    double lipschitz_llr = 3.0;                      // L_p: |logit g' - logit g| <= 3 on the default box
    double lipschitz_mean = std::sqrt(3.0) / 4.0;    // L_g
    double sigma = 0.5;                              // Bernoulli rewards are 1/2-sub-Gaussian
    double diam_x = std::numbers::sqrt2;             // max ||x|| over [0,1]^2
    double diam_x_theta = std::sqrt(3.0);            // max ||(x, theta)|| over [0,1]^3
    int dim_x = 2;
    int dim_theta = 1;

    bool valid() const {
        return lipschitz_dynamics > 0.0 && lipschitz_dynamics <= 1.0 && lipschitz_llr > 0.0 &&
               lipschitz_mean > 0.0 && sigma > 0.0 && diam_x > 0.0 && diam_x_theta > 0.0 && dim_x > 0 &&
               dim_theta > 0;
    }
};

inline double c_f_constant(const ConcentrationConfig& cfg) {
    const double pi = std::numbers::pi;
    const double dims = static_cast<double>(cfg.dim_x + cfg.dim_theta);
    const double first = 8.0 * cfg.lipschitz_dynamics * cfg.diam_x * std::sqrt(pi);
    const double second = 48.0 * std::numbers::sqrt2 * std::pow(2.0, 1.0 / dims) * cfg.lipschitz_dynamics *
                          cfg.diam_x_theta * std::sqrt(pi * dims);
    return first + second;
}

/// B(alpha) = c_f / sqrt(log(1/alpha)) + L_p sigma sqrt(2), for alpha in (0,1).
inline double concentration_b(const ConcentrationConfig& cfg, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::RadiusUndefined, "alpha must lie in (0,1)");
    return c_f_constant(cfg) / std::sqrt(std::log(1.0 / alpha)) +
           cfg.lipschitz_llr * cfg.sigma * std::numbers::sqrt2;
}

/// B(t^-4) sqrt(4 log t / T_i). `round` is real-valued so callers can probe t = e^k exactly.
inline double radius_theoretical(const ConcentrationConfig& cfg, double round, std::size_t pulls) {
    if (!(round >= 2.0)) throw Error(ErrorCode::RadiusUndefined, "round must be >= 2");
    if (pulls == 0) throw Error(ErrorCode::RadiusUndefined, "pull count must be >= 1");
    const double log_t = std::log(round);
    const double b = c_f_constant(cfg) / (2.0 * std::sqrt(log_t)) +
                     cfg.lipschitz_llr * cfg.sigma * std::numbers::sqrt2;
    return b * std::sqrt(4.0 * log_t / static_cast<double>(pulls));
}

enum class VarianceEstimator { EmpiricalLlr };

struct TunedRadiusConfig {
    double eta = 1.0;
    VarianceEstimator variance_estimator = VarianceEstimator::EmpiricalLlr;
};

/// sqrt(min(eta/4, variance) log t / T_i).
inline double radius_tuned(const TunedRadiusConfig& cfg, double variance_est, double round, std::size_t pulls) {
    if (!(cfg.eta > 0.0)) throw Error(ErrorCode::InvalidRadius, "eta must be positive");
    if (!(variance_est >= 0.0)) throw Error(ErrorCode::InvalidRadius, "variance estimate must be >= 0");
    if (pulls == 0) throw Error(ErrorCode::RadiusUndefined, "pull count must be >= 1");
    const double log_t = std::max(std::log(round), 0.0);
    return std::sqrt(std::min(cfg.eta / 4.0, variance_est) * log_t / static_cast<double>(pulls));
}

/// Unbiased (n-1) sample variance.
inline double sample_variance(std::span<const double> values) {
    if (values.size() < 2) throw Error(ErrorCode::InsufficientData, "need at least two values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(values.size() - 1);
}

/// Per-round log-likelihood ratio ln p(r | alt) / p(r | mle), both means clipped.
inline double log_likelihood_ratio(int reward, double g_alt, double g_mle) {
    g_alt = detail::clip_probability(g_alt);
    g_mle = detail::clip_probability(g_mle);
    return reward ? std::log(g_alt / g_mle) : std::log((1.0 - g_alt) / (1.0 - g_mle));
}

/// Plug-in variance of the per-round log-likelihood ratio between `alt` and the
/// MLE over the log's observed rounds.
inline double estimate_trajectory_variance(const ObservationLog& log, const Hypothesis& mle, const Hypothesis& alt,
                                           const DynamicsSpec& dyn, const RewardModelSpec& model) {
    if (log.observed_count() < 2) throw Error(ErrorCode::InsufficientData, "need at least two observed rounds");
    std::vector<double> llr;
    llr.reserve(log.observed_count());
    StateVec xm = mle.x0;
    StateVec xa = alt.x0;
    for (const auto& o : log.entries()) {
        if (o.observed) {
            llr.push_back(log_likelihood_ratio(o.reward, mean_reward(model, alt.theta, xa),
                                               mean_reward(model, mle.theta, xm)));
        }
        xm = step_dynamics(dyn, xm, o.action);
        xa = step_dynamics(dyn, xa, o.action);
    }
    return sample_variance(llr);
}

}  // namespace cobrah

#endif
