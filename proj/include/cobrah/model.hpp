#ifndef COBRAH_MODEL_HPP
#define COBRAH_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace cobrah {

/// Binary allocation decision for one arm in one round (1 = visited).
using Action = std::uint8_t;

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

/// Arm state: beneficial factor `b` and adverse factor `a`, both in [0,1].
struct StateVec {
    double b = 0.0;
    double a = 0.0;

    bool in_box() const { return b >= 0.0 && b <= 1.0 && a >= 0.0 && a <= 1.0; }

    friend bool operator==(const StateVec&, const StateVec&) = default;
};

inline StateVec clamp_state(StateVec x) { return {clamp01(x.b), clamp01(x.a)}; }

/// x' = clamp(D x + Q y + K) with D = diag(d1, d2), Q = (q1, q2), K = (k1, k2).
struct DynamicsSpec {
    double d1 = 1.0;
    double d2 = 1.0;
    double q1 = 0.0;
    double q2 = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;

    /// Builds the dynamics from the sampling primitives (q'1, q'2): visiting
    /// lowers the beneficial factor by q'1 and moves the adverse factor to q'2
    /// above its decayed value, instead of the resting drift k.
    static DynamicsSpec from_primitives(double d1, double d2, double q1_prime, double q2_prime,
                                        double k1, double k2) {
        return {d1, d2, -q1_prime - k1, q2_prime - k2, k1, k2};
    }

    static DynamicsSpec identity() { return {}; }

    /// max(|d1|, |d2|) <= 1, i.e. the map is non-expansive.
    bool is_stable() const { return std::max(std::abs(d1), std::abs(d2)) <= 1.0; }

    friend bool operator==(const DynamicsSpec&, const DynamicsSpec&) = default;
};

/// Logistic link g(theta, x) = 1 / (1 + exp(-(nu*theta + omega . x))).
struct RewardModelSpec {
    double nu = 1.0;
    double omega_b = 1.0;
    double omega_a = -1.0;

    double index(double theta, StateVec x) const { return nu * theta + omega_b * x.b + omega_a * x.a; }

    /// Upper bound on the Lipschitz constant of g over (theta, b, a).
    double lipschitz_bound() const {
        return 0.25 * std::sqrt(nu * nu + omega_b * omega_b + omega_a * omega_a);
    }

    friend bool operator==(const RewardModelSpec&, const RewardModelSpec&) = default;
};

/// Ground-truth description of one arm.
struct ArmSpec {
    double theta = 0.0;
    DynamicsSpec dynamics;
    StateVec x0;
    RewardModelSpec reward_model;

    bool valid() const { return theta >= 0.0 && theta <= 1.0 && x0.in_box(); }
};

/// Subset of arm indices played in one round; members are kept sorted and unique.
class SuperArm {
  public:
    SuperArm() = default;
    SuperArm(std::initializer_list<std::size_t> members) : SuperArm(std::vector<std::size_t>(members)) {}
    explicit SuperArm(std::vector<std::size_t> members) : members_(std::move(members)) {
        std::sort(members_.begin(), members_.end());
        members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    }

    const std::vector<std::size_t>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    bool contains(std::size_t arm) const { return std::binary_search(members_.begin(), members_.end(), arm); }

    /// |S| <= capacity and every index < arm_count.
    bool fits(std::size_t arm_count, std::size_t capacity) const {
        return members_.size() <= capacity && (members_.empty() || members_.back() < arm_count);
    }

    /// Per-arm action vector of length `arm_count`.
    std::vector<Action> actions(std::size_t arm_count) const {
        std::vector<Action> y(arm_count, 0);
        for (auto i : members_) {
            if (i < arm_count) y[i] = 1;
        }
        return y;
    }

    friend bool operator==(const SuperArm&, const SuperArm&) = default;

  private:
    std::vector<std::size_t> members_;
};

inline double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline double mean_reward(const RewardModelSpec& spec, double theta, StateVec x) {
    return logistic(spec.index(theta, x));
}

inline StateVec step_dynamics(const DynamicsSpec& dyn, StateVec x, Action y) {
    const double yy = y ? 1.0 : 0.0;
    return {clamp01(dyn.d1 * x.b + dyn.q1 * yy + dyn.k1), clamp01(dyn.d2 * x.a + dyn.q2 * yy + dyn.k2)};
}

/// General f(theta, x, y) signature; theta does not enter the piecewise-linear instantiation.
inline StateVec step_dynamics(const DynamicsSpec& dyn, double /*theta*/, StateVec x, Action y) {
    return step_dynamics(dyn, x, y);
}

/// States x_1..x_T reached from arm.x0 under `actions`.
inline std::vector<StateVec> rollout(const ArmSpec& arm, std::span<const Action> actions) {
    if (actions.empty()) throw Error(ErrorCode::EmptyHistory, "rollout needs at least one action");
    std::vector<StateVec> states;
    states.reserve(actions.size());
    StateVec x = arm.x0;
    for (auto y : actions) {
        x = step_dynamics(arm.dynamics, arm.theta, x, y);
        states.push_back(x);
    }
    return states;
}

/// State after applying `actions` to x0 (x0 itself for an empty sequence).
inline StateVec propagate(const DynamicsSpec& dyn, StateVec x0, std::span<const Action> actions) {
    StateVec x = x0;
    for (auto y : actions) x = step_dynamics(dyn, x, y);
    return x;
}

/// One Bernoulli(mean) draw; consumes exactly one engine output so streams stay aligned.
inline int sample_reward(Rng& rng, double mean) {
    if (!(mean >= 0.0 && mean <= 1.0)) throw Error(ErrorCode::InvalidMean, "mean outside [0,1]");
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return u < mean ? 1 : 0;
}

}  // namespace cobrah

#endif
