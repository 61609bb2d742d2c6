// Test-only helpers: random instance generators and a plain re-implementation
// of the dynamics, link and divergences used as oracles. Nothing here calls
// into the library's solver paths.
#ifndef COBRAH_TESTS_SUPPORT_HPP
#define COBRAH_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <cobrah/model.hpp>
#include <cobrah/observation.hpp>

namespace testing_support {

using cobrah::Action;

namespace oracle {

struct Params {
    double theta, b0, a0;
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double clip(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

/// Means at every round 1..n; round k sees the state after actions 1..k-1.
inline std::vector<double> means(const cobrah::DynamicsSpec& d, const cobrah::RewardModelSpec& m, Params p,
                                 const std::vector<Action>& actions) {
    std::vector<double> out;
    double b = p.b0, a = p.a0;
    for (Action y : actions) {
        out.push_back(sigmoid(m.nu * p.theta + m.omega_b * b + m.omega_a * a));
        const double nb = clip(d.d1 * b + d.q1 * y + d.k1);
        const double na = clip(d.d2 * a + d.q2 * y + d.k2);
        b = nb;
        a = na;
    }
    return out;
}

/// Mean at the state reached after applying every action in `actions`.
inline double target_mean(const cobrah::DynamicsSpec& d, const cobrah::RewardModelSpec& m, Params p,
                          const std::vector<Action>& actions) {
    double b = p.b0, a = p.a0;
    for (Action y : actions) {
        const double nb = clip(d.d1 * b + d.q1 * y + d.k1);
        const double na = clip(d.d2 * a + d.q2 * y + d.k2);
        b = nb;
        a = na;
    }
    return sigmoid(m.nu * p.theta + m.omega_b * b + m.omega_a * a);
}

inline double kl(double p, double q) {
    q = std::min(std::max(q, 1e-9), 1.0 - 1e-9);
    double s = 0.0;
    if (p > 0.0) s += p * std::log(p / q);
    if (p < 1.0) s += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
    return s;
}

inline double nll(const cobrah::DynamicsSpec& d, const cobrah::RewardModelSpec& m, Params p,
                  const cobrah::ObservationLog& log) {
    const auto g = means(d, m, p, log.actions());
    double s = 0.0;
    for (std::size_t k = 0; k < log.size(); ++k) {
        if (!log[k].observed) continue;
        s -= log[k].reward ? std::log(g[k]) : std::log(1.0 - g[k]);
    }
    return s;
}

inline double average_kl(const cobrah::DynamicsSpec& d, const cobrah::RewardModelSpec& m, Params cand, Params ref,
                         const cobrah::ObservationLog& log) {
    const auto gc = means(d, m, cand, log.actions());
    const auto gr = means(d, m, ref, log.actions());
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < log.size(); ++k) {
        if (!log[k].observed) continue;
        s += kl(gc[k], gr[k]);
        ++n;
    }
    return s / static_cast<double>(n);
}

/// Exhaustive search over subsets: size exactly C for semi-bandit, at most C
/// for full feedback. `values[i] = {if visited, if not visited}`; semi-bandit
/// uses only the first entry. Returns the best subset as a bitmask; the
/// earliest mask in enumeration order wins exact ties.
inline unsigned best_subset(const std::vector<std::pair<double, double>>& values, std::size_t capacity, bool full) {
    const std::size_t m = values.size();
    unsigned best_mask = 0;
    double best = -1e300;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
        if (full ? size > capacity : size != capacity) continue;
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const bool on = mask & (1u << i);
            if (on) total += values[i].first;
            else if (full) total += values[i].second;
        }
        if (total > best) {
            best = total;
            best_mask = mask;
        }
    }
    return best_mask;
}

inline unsigned mask_of(const std::vector<std::size_t>& members) {
    unsigned mask = 0;
    for (auto i : members) mask |= 1u << i;
    return mask;
}

}  // namespace oracle

inline cobrah::DynamicsSpec random_primitive_dynamics(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(0.5, 1.0), q(0.1, 2.0), k(0.1, 2.0);
    const double d1 = d(rng), d2 = d(rng), q1 = q(rng), q2 = q(rng), k1 = k(rng), k2 = k(rng);
    return cobrah::DynamicsSpec::from_primitives(d1, d2, q1, q2, k1, k2);
}

/// Gentler dynamics that keep states off the clamp boundaries more often.
inline cobrah::DynamicsSpec random_mild_dynamics(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(0.5, 0.95), q(-0.3, 0.3), k(0.0, 0.2);
    return {d(rng), d(rng), q(rng), q(rng), k(rng), k(rng)};
}

inline cobrah::ArmSpec random_arm(std::mt19937_64& rng, bool mild = false) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    cobrah::ArmSpec arm;
    arm.theta = u(rng);
    arm.dynamics = mild ? random_mild_dynamics(rng) : random_primitive_dynamics(rng);
    arm.x0 = {u(rng), u(rng)};
    return arm;
}

inline std::vector<Action> random_actions(std::mt19937_64& rng, std::size_t n, double p_visit = 0.5) {
    std::bernoulli_distribution visit(p_visit);
    std::vector<Action> y(n);
    for (auto& v : y) v = visit(rng) ? 1 : 0;
    return y;
}

/// Builds a log by simulating `arm` under `actions`; every round observed unless `semi_bandit`.
inline cobrah::ObservationLog simulate_log(const cobrah::ArmSpec& arm, const std::vector<Action>& actions,
                                           std::mt19937_64& rng, bool semi_bandit = false) {
    cobrah::ObservationLog log;
    const auto g = oracle::means(arm.dynamics, arm.reward_model, {arm.theta, arm.x0.b, arm.x0.a}, actions);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t k = 0; k < actions.size(); ++k) {
        const int r = u(rng) < g[k] ? 1 : 0;
        if (semi_bandit && !actions[k]) {
            log.append(actions[k], std::nullopt);
        } else {
            log.append(actions[k], r);
        }
    }
    return log;
}

}  // namespace testing_support

#endif
