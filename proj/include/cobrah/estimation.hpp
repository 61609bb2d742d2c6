#ifndef COBRAH_ESTIMATION_HPP
#define COBRAH_ESTIMATION_HPP

#include <algorithm>
#include <array>
#include <concepts>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "divergence.hpp"
#include "error.hpp"
#include "model.hpp"
#include "observation.hpp"

namespace cobrah {

enum class GradientMode {
    CentralDifference,  // finite differences with SolverConfig::fd_step
    Sensitivity,        // exact forward sensitivities through the clamped dynamics
};

/// Settings shared by the MLE and UCB solvers.
struct SolverConfig {
    std::size_t lattice_per_axis = 5;  // starts per axis on [0,1]^3; 0 disables the lattice
    std::size_t max_iterations = 200;
    double initial_step = 0.05;
    double tolerance = 1e-7;
    double fd_step = 1e-5;
    GradientMode gradient = GradientMode::CentralDifference;
    std::size_t penalty_rounds = 5;   // multiplier doubles each round
    double penalty_initial = 100.0;
    double feasibility_tolerance = 1e-6;  // relative to the radius
};

struct MleResult {
    Hypothesis estimate;
    double neg_log_likelihood = 0.0;
    bool converged = false;
};

struct UcbResult {
    double value = 0.0;       // optimistic mean at the target state
    Hypothesis argmax;        // maximiser, reusable as a warm start
    double average_kl = 0.0;  // (1/|T_i|) trajectory KL of argmax against the MLE
};

/// Right-hand side of the trajectory-KL constraint. Either a constant, or the
/// candidate-dependent sqrt(min(eta/4, V(candidate)) log t / T_i).
struct ConfidenceRadius {
    enum class Kind { Fixed, Tuned };
    Kind kind = Kind::Fixed;
    double fixed = 0.0;
    double eta = 1.0;
    double log_t_over_pulls = 0.0;

    static ConfidenceRadius constant(double radius) { return {Kind::Fixed, radius, 1.0, 0.0}; }

    static ConfidenceRadius tuned(const TunedRadiusConfig& cfg, double round, std::size_t pulls) {
        if (pulls == 0) throw Error(ErrorCode::RadiusUndefined, "pull count must be >= 1");
        return {Kind::Tuned, 0.0, cfg.eta, std::max(std::log(round), 0.0) / static_cast<double>(pulls)};
    }

    /// Largest value the radius can take; used to scale the penalty.
    double reference() const { return kind == Kind::Fixed ? fixed : std::sqrt(eta / 4.0 * log_t_over_pulls); }
};

namespace detail {

using Point = std::array<double, 3>;  // (theta, b0, a0)

inline Point to_point(const Hypothesis& h) { return {h.theta, h.x0.b, h.x0.a}; }
inline Hypothesis to_hypothesis(const Point& p) { return {p[0], {p[1], p[2]}}; }
inline Point project(Point p) {
    for (auto& v : p) v = clamp01(v);
    return p;
}

inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

/// Rolls one arm's known dynamics from a candidate (theta, x0) through the
/// logged actions and records the logistic index z (and its sensitivities)
/// at every observed round, plus at the state reached by an optional target
/// action sequence. A round is scored before its own action is applied.
class TrajectoryEvaluator {
  public:
    TrajectoryEvaluator(const ObservationLog& log, const DynamicsSpec& dyn, const RewardModelSpec& model,
                        std::span<const Action> target = {}, bool with_target = false)
        : dyn_(dyn), model_(model), actions_(log.actions()), with_target_(with_target) {
        observed_.reserve(log.size());
        for (const auto& o : log.entries()) {
            observed_.push_back(o.observed ? 1 : 0);
            if (o.observed) rewards_.push_back(o.reward);
        }
        const std::size_t n = rewards_.size();
        z_.resize(n);
        dzb_.resize(n);
        dza_.resize(n);
        if (with_target_) {
            target_shares_prefix_ = target.size() >= actions_.size() &&
                                    std::equal(actions_.begin(), actions_.end(), target.begin());
            target_.assign(target.begin(), target.end());
        }
    }

    std::size_t observed_count() const { return rewards_.size(); }
    std::span<const int> rewards() const { return rewards_; }
    std::span<const double> z() const { return z_; }
    std::span<const double> dz_b() const { return dzb_; }
    std::span<const double> dz_a() const { return dza_; }
    double nu() const { return model_.nu; }
    double z_target() const { return zt_; }
    double dz_target_b() const { return dztb_; }
    double dz_target_a() const { return dzta_; }

    void evaluate(const Point& p) {
        const double base = model_.nu * p[0];
        double b = p[1], a = p[2], sb = 1.0, sa = 1.0;
        std::size_t k = 0;
        const std::size_t len = actions_.size();
        for (std::size_t s = 0; s < len; ++s) {
            if (observed_[s]) {
                z_[k] = base + model_.omega_b * b + model_.omega_a * a;
                dzb_[k] = model_.omega_b * sb;
                dza_[k] = model_.omega_a * sa;
                ++k;
            }
            step(actions_[s], b, a, sb, sa);
        }
        if (!with_target_) return;
        if (target_shares_prefix_) {
            for (std::size_t s = len; s < target_.size(); ++s) step(target_[s], b, a, sb, sa);
        } else {
            b = p[1], a = p[2], sb = 1.0, sa = 1.0;
            for (auto y : target_) step(y, b, a, sb, sa);
        }
        zt_ = base + model_.omega_b * b + model_.omega_a * a;
        dztb_ = model_.omega_b * sb;
        dzta_ = model_.omega_a * sa;
    }

  private:
    void step(Action y, double& b, double& a, double& sb, double& sa) const {
        const double yy = y ? 1.0 : 0.0;
        double nb = dyn_.d1 * b + dyn_.q1 * yy + dyn_.k1;
        if (nb <= 0.0) {
            nb = 0.0;
            sb = 0.0;
        } else if (nb >= 1.0) {
            nb = 1.0;
            sb = 0.0;
        } else {
            sb *= dyn_.d1;
        }
        double na = dyn_.d2 * a + dyn_.q2 * yy + dyn_.k2;
        if (na <= 0.0) {
            na = 0.0;
            sa = 0.0;
        } else if (na >= 1.0) {
            na = 1.0;
            sa = 0.0;
        } else {
            sa *= dyn_.d2;
        }
        b = nb;
        a = na;
    }

    DynamicsSpec dyn_;
    RewardModelSpec model_;
    std::span<const Action> actions_;
    std::vector<Action> observed_;
    std::vector<int> rewards_;
    std::vector<double> z_, dzb_, dza_;
    std::vector<Action> target_;
    bool with_target_ = false;
    bool target_shares_prefix_ = false;
    double zt_ = 0.0, dztb_ = 0.0, dzta_ = 0.0;
};

/// Objective interface used by the projected-gradient solver (minimisation).
template <typename F>
concept Objective = requires(F f, const Point& p, Point& g) {
    { f.value(p) } -> std::convertible_to<double>;
    { f.value_and_gradient(p, g) } -> std::convertible_to<double>;
};

template <Objective F>
double evaluate_with_gradient(F& f, const Point& p, Point& g, const SolverConfig& cfg) {
    if (cfg.gradient == GradientMode::Sensitivity) return f.value_and_gradient(p, g);
    const double h = cfg.fd_step;
    for (std::size_t k = 0; k < 3; ++k) {
        Point up = p, down = p;
        up[k] += h;
        down[k] -= h;
        g[k] = (f.value(up) - f.value(down)) / (2.0 * h);
    }
    return f.value(p);
}

struct DescentResult {
    Point point{};
    double value = 0.0;
    bool converged = false;
};

/// Projected gradient descent on [0,1]^3: step halves whenever the trial
/// point fails to improve and doubles (up to 1) after an accepted step.
template <Objective F>
DescentResult projected_descent(F& f, Point start, const SolverConfig& cfg) {
    DescentResult out;
    Point p = project(start);
    Point g{};
    double fp = evaluate_with_gradient(f, p, g, cfg);
    double step = cfg.initial_step;
    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        bool accepted = false;
        Point q{};
        double fq = fp;
        while (step >= cfg.tolerance) {
            for (std::size_t k = 0; k < 3; ++k) q[k] = clamp01(p[k] - step * g[k]);
            if (q == p) break;
            fq = f.value(q);
            if (fq < fp) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            out.converged = true;
            break;
        }
        double moved = 0.0;
        for (std::size_t k = 0; k < 3; ++k) moved = std::max(moved, std::abs(q[k] - p[k]));
        const double gain = fp - fq;
        p = q;
        if (moved < cfg.tolerance && gain < cfg.tolerance * std::max(1.0, std::abs(fp))) {
            fp = fq;
            out.converged = true;
            break;
        }
        fp = evaluate_with_gradient(f, p, g, cfg);
        step = std::min(step * 2.0, 1.0);
    }
    out.point = p;
    out.value = fp;
    return out;
}

inline std::vector<Point> lattice_starts(std::size_t per_axis) {
    std::vector<Point> starts;
    if (per_axis == 0) return starts;
    std::vector<double> ticks;
    if (per_axis == 1) {
        ticks.push_back(0.5);
    } else {
        for (std::size_t k = 0; k < per_axis; ++k) ticks.push_back(static_cast<double>(k) / (per_axis - 1));
    }
    for (double t : ticks)
        for (double b : ticks)
            for (double a : ticks) starts.push_back({t, b, a});
    return starts;
}

/// Mean negative log-likelihood over observed rounds (scaled by 1/n so the
/// gradient is O(1) regardless of history length).
class NllObjective {
  public:
    explicit NllObjective(TrajectoryEvaluator& ev) : ev_(ev) {}

    double total(const Point& p) {
        ev_.evaluate(p);
        double s = 0.0;
        const auto z = ev_.z();
        const auto r = ev_.rewards();
        for (std::size_t k = 0; k < z.size(); ++k) s += softplus(z[k]) - r[k] * z[k];
        return s;
    }

    double value(const Point& p) { return total(p) / static_cast<double>(ev_.observed_count()); }

    double value_and_gradient(const Point& p, Point& g) {
        ev_.evaluate(p);
        const auto z = ev_.z();
        const auto r = ev_.rewards();
        const auto dzb = ev_.dz_b();
        const auto dza = ev_.dz_a();
        double s = 0.0;
        g = {0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < z.size(); ++k) {
            s += softplus(z[k]) - r[k] * z[k];
            const double resid = logistic(z[k]) - r[k];
            g[0] += resid * ev_.nu();
            g[1] += resid * dzb[k];
            g[2] += resid * dza[k];
        }
        const double n = static_cast<double>(z.size());
        for (auto& v : g) v /= n;
        return s / n;
    }

  private:
    TrajectoryEvaluator& ev_;
};

/// Penalised UCB objective: -g(target) + mu * max(0, (avgKL - radius) / scale)^2.
class UcbObjective {
  public:
    UcbObjective(TrajectoryEvaluator& ev, std::vector<double> mle_z, const ConfidenceRadius& radius)
        : ev_(ev), mle_z_(std::move(mle_z)), radius_(radius) {
        mle_logit_.reserve(mle_z_.size());
        for (double z : mle_z_) {
            const double q = clip_probability(logistic(z));
            mle_logit_.push_back(std::log(q) - std::log1p(-q));
            log_q_.push_back(std::log(q));
            log_1mq_.push_back(std::log1p(-q));
        }
        scale_ = std::max(radius_.reference(), 1e-12);
    }

    void set_penalty(double mu) { mu_ = mu; }

    /// avgKL - radius at p, in absolute units.
    double constraint(const Point& p) {
        ev_.evaluate(p);
        Point unused{};
        return constraint_terms(false, unused);
    }

    double target_mean(const Point& p) {
        ev_.evaluate(p);
        return logistic(ev_.z_target());
    }

    double average_kl(const Point& p) {
        ev_.evaluate(p);
        double s = 0.0;
        for (std::size_t k = 0; k < mle_z_.size(); ++k) s += kl_term(k, ev_.z()[k]);
        return s / static_cast<double>(mle_z_.size());
    }

    double value(const Point& p) {
        ev_.evaluate(p);
        Point unused{};
        const double c = constraint_terms(false, unused) / scale_;
        const double viol = std::max(c, 0.0);
        return -logistic(ev_.z_target()) + mu_ * viol * viol;
    }

    double value_and_gradient(const Point& p, Point& g) {
        ev_.evaluate(p);
        Point dc{};
        const double c = constraint_terms(true, dc) / scale_;
        const double gt = logistic(ev_.z_target());
        const double slope = gt * (1.0 - gt);
        g = {-slope * ev_.nu(), -slope * ev_.dz_target_b(), -slope * ev_.dz_target_a()};
        if (c > 0.0) {
            const double w = 2.0 * mu_ * c / scale_;
            for (std::size_t k = 0; k < 3; ++k) g[k] += w * dc[k];
        }
        const double viol = std::max(c, 0.0);
        return -gt + mu_ * viol * viol;
    }

  private:
    double kl_term(std::size_t k, double z) const {
        const double p = logistic(z);
        double kl = 0.0;
        if (p > 0.0) kl += p * (std::log(p) - log_q_[k]);
        if (p < 1.0) kl += (1.0 - p) * (std::log1p(-p) - log_1mq_[k]);
        return std::max(kl, 0.0);
    }

    static double clip_probability(double q) { return detail::clip_probability(q); }

    // Evaluates avgKL - radius for the current evaluator state; fills its gradient when asked.
    double constraint_terms(bool want_gradient, Point& grad) {
        const auto z = ev_.z();
        const auto dzb = ev_.dz_b();
        const auto dza = ev_.dz_a();
        const double n = static_cast<double>(z.size());
        double kl = 0.0;
        Point dkl{0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < z.size(); ++k) {
            kl += kl_term(k, z[k]);
            if (want_gradient) {
                const double p = logistic(z[k]);
                const double dk = p * (1.0 - p) * (z[k] - mle_logit_[k]);
                dkl[0] += dk * ev_.nu();
                dkl[1] += dk * dzb[k];
                dkl[2] += dk * dza[k];
            }
        }
        kl /= n;
        for (auto& v : dkl) v /= n;

        double rad = radius_.fixed;
        Point drad{0.0, 0.0, 0.0};
        if (radius_.kind == ConfidenceRadius::Kind::Tuned) {
            const double cap = radius_.eta / 4.0;
            double variance = cap;
            Point dvar{0.0, 0.0, 0.0};
            if (z.size() >= 2) {
                variance_terms(want_gradient, variance, dvar);
            }
            if (variance >= cap) {
                variance = cap;
                dvar = {0.0, 0.0, 0.0};
            }
            rad = std::sqrt(variance * radius_.log_t_over_pulls);
            if (want_gradient && rad > 0.0) {
                for (std::size_t k = 0; k < 3; ++k) drad[k] = radius_.log_t_over_pulls * dvar[k] / (2.0 * rad);
            }
        }
        if (want_gradient) {
            for (std::size_t k = 0; k < 3; ++k) grad[k] = dkl[k] - drad[k];
        }
        return kl - rad;
    }

    // Sample variance of per-round log-likelihood ratios ln p(r|candidate)/p(r|mle).
    void variance_terms(bool want_gradient, double& variance, Point& dvar) {
        const auto z = ev_.z();
        const auto r = ev_.rewards();
        const auto dzb = ev_.dz_b();
        const auto dza = ev_.dz_a();
        const std::size_t n = z.size();
        llr_.resize(n);
        double mean = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double g = clip_probability(logistic(z[k]));
            llr_[k] = r[k] ? std::log(g) - log_q_[k] : std::log1p(-g) - log_1mq_[k];
            mean += llr_[k];
        }
        mean /= static_cast<double>(n);
        double ss = 0.0;
        dvar = {0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) {
            const double dev = llr_[k] - mean;
            ss += dev * dev;
            if (want_gradient) {
                const double dl = r[k] - logistic(z[k]);
                dvar[0] += dev * dl * ev_.nu();
                dvar[1] += dev * dl * dzb[k];
                dvar[2] += dev * dl * dza[k];
            }
        }
        const double denom = static_cast<double>(n - 1);
        variance = ss / denom;
        for (auto& v : dvar) v *= 2.0 / denom;
    }

    TrajectoryEvaluator& ev_;
    std::vector<double> mle_z_;
    std::vector<double> mle_logit_, log_q_, log_1mq_;
    std::vector<double> llr_;
    ConfidenceRadius radius_;
    double scale_ = 1.0;
    double mu_ = 0.0;
};

inline std::vector<double> observed_indices(TrajectoryEvaluator& ev, const Hypothesis& h) {
    ev.evaluate(to_point(h));
    return {ev.z().begin(), ev.z().end()};
}

}  // namespace detail

/// -sum over observed rounds of log p(r_t | theta, x_t), with x_t rolled from x0
/// through every logged action.
inline double neg_log_likelihood(const Hypothesis& candidate, const ObservationLog& log, const DynamicsSpec& dyn,
                                 const RewardModelSpec& model) {
    if (log.observed_count() == 0) throw Error(ErrorCode::EmptyHistory, "no observed rounds");
    detail::TrajectoryEvaluator ev(log, dyn, model);
    detail::NllObjective nll(ev);
    return nll.total(detail::to_point(candidate));
}

/// Multi-start projected-gradient MLE of (theta, x0) over [0,1]^3.
inline MleResult fit_mle(const ObservationLog& log, const DynamicsSpec& dyn, const RewardModelSpec& model,
                         const SolverConfig& cfg = {}, std::span<const Hypothesis> warm_starts = {}) {
    if (log.observed_count() == 0) throw Error(ErrorCode::EmptyHistory, "no observed rounds");
    detail::TrajectoryEvaluator ev(log, dyn, model);
    detail::NllObjective nll(ev);

    auto starts = detail::lattice_starts(cfg.lattice_per_axis);
    for (const auto& w : warm_starts) starts.push_back(detail::to_point(w));
    if (starts.empty()) starts.push_back({0.5, 0.5, 0.5});

    detail::DescentResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (const auto& s : starts) {
        auto r = detail::projected_descent(nll, s, cfg);
        if (r.value < best.value) best = r;
    }
    MleResult out;
    out.estimate = detail::to_hypothesis(best.point);
    out.neg_log_likelihood = nll.total(best.point);
    out.converged = best.converged;
    return out;
}

/// max g(theta, f^target(x0)) subject to (1/|T_i|) D(candidate || mle) <= radius,
/// where `target_actions` are the actions rolled from x0 to reach the state of
/// interest (typically the logged actions plus the action being considered).
inline UcbResult ucb_mean(const ObservationLog& log, const MleResult& mle, std::span<const Action> target_actions,
                          const ConfidenceRadius& radius, const DynamicsSpec& dyn, const RewardModelSpec& model,
                          const SolverConfig& cfg = {}, std::span<const Hypothesis> warm_starts = {}) {
    if (radius.kind == ConfidenceRadius::Kind::Fixed && !(radius.fixed >= 0.0)) {
        throw Error(ErrorCode::InvalidRadius, "radius must be >= 0");
    }
    if (log.observed_count() == 0) throw Error(ErrorCode::EmptyHistory, "no observed rounds");
    detail::TrajectoryEvaluator ev(log, dyn, model, target_actions, true);
    const detail::Point centre = detail::to_point(mle.estimate);
    auto mle_z = detail::observed_indices(ev, mle.estimate);
    detail::UcbObjective obj(ev, std::move(mle_z), radius);

    UcbResult best;
    best.argmax = mle.estimate;
    best.value = obj.target_mean(centre);
    best.average_kl = 0.0;
    if (radius.reference() <= 0.0) return best;

    const double tol = cfg.feasibility_tolerance * radius.reference();
    auto starts = detail::lattice_starts(cfg.lattice_per_axis);
    starts.push_back(centre);
    for (const auto& w : warm_starts) starts.push_back(detail::to_point(w));

    for (const auto& s : starts) {
        detail::Point p = detail::project(s);
        double mu = cfg.penalty_initial;
        for (std::size_t round = 0; round < std::max<std::size_t>(cfg.penalty_rounds, 1); ++round) {
            obj.set_penalty(mu);
            p = detail::projected_descent(obj, p, cfg).point;
            mu *= 2.0;
        }
        if (obj.constraint(p) > tol) {
            // Pull back along the segment towards the (feasible) MLE.
            double lo = 0.0, hi = 1.0;
            for (int k = 0; k < 50; ++k) {
                const double mid = 0.5 * (lo + hi);
                detail::Point q{};
                for (std::size_t j = 0; j < 3; ++j) q[j] = centre[j] + mid * (p[j] - centre[j]);
                if (obj.constraint(q) <= 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            for (std::size_t j = 0; j < 3; ++j) p[j] = centre[j] + lo * (p[j] - centre[j]);
            if (obj.constraint(p) > tol) continue;
        }
        const double v = obj.target_mean(p);
        if (v > best.value) {
            best.value = v;
            best.argmax = detail::to_hypothesis(p);
            best.average_kl = obj.average_kl(p);
        }
    }
    return best;
}

/// Convenience overload for a constant radius.
inline UcbResult ucb_mean(const ObservationLog& log, const MleResult& mle, std::span<const Action> target_actions,
                          double radius, const DynamicsSpec& dyn, const RewardModelSpec& model,
                          const SolverConfig& cfg = {}, std::span<const Hypothesis> warm_starts = {}) {
    if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidRadius, "radius must be >= 0");
    return ucb_mean(log, mle, target_actions, ConfidenceRadius::constant(radius), dyn, model, cfg, warm_starts);
}

}  // namespace cobrah

#endif
