#ifndef COBRAH_COHORT_HPP
#define COBRAH_COHORT_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace cobrah {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double at(double u) const { return lo + (hi - lo) * u; }
    bool contains(double v) const { return v >= lo && v <= hi; }
};

namespace detail {

/// Uniform double in [0,1) from the top 53 bits; platform independent.
inline double unit_draw(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Sampling ranges for synthetic arms; q' are the visit-effect primitives,
/// mapped to q1 = -q'1 - k1 and q2 = q'2 - k2.
struct SyntheticCohortSpec {
    std::size_t arms = 20;
    std::uint64_t seed = 1;
    Interval decay{0.5, 1.0};
    Interval visit_effect{0.1, 2.0};
    Interval drift{0.1, 2.0};
    Interval initial_state{0.0, 1.0};
    Interval theta{0.0, 1.0};
};

inline std::vector<ArmSpec> generate_synthetic_cohort(const SyntheticCohortSpec& spec,
                                                      const RewardModelSpec& model = {}) {
    if (spec.arms == 0) throw Error(ErrorCode::ConfigError, "cohort needs at least one arm");
    Rng rng = make_stream(spec.seed, 0, 0, StreamPurpose::Cohort);
    auto u = [&] { return detail::unit_draw(rng); };
    std::vector<ArmSpec> arms;
    arms.reserve(spec.arms);
    for (std::size_t i = 0; i < spec.arms; ++i) {
        const double d1 = spec.decay.at(u()), d2 = spec.decay.at(u());
        const double qp1 = spec.visit_effect.at(u()), qp2 = spec.visit_effect.at(u());
        const double k1 = spec.drift.at(u()), k2 = spec.drift.at(u());
        ArmSpec a;
        a.dynamics = DynamicsSpec::from_primitives(d1, d2, qp1, qp2, k1, k2);
        a.x0 = {spec.initial_state.at(u()), spec.initial_state.at(u())};
        a.theta = spec.theta.at(u());
        a.reward_model = model;
        arms.push_back(a);
    }
    return arms;
}

/// Search box for fitted patients. Coefficients are searched directly (no
/// primitives); x0 is fixed at the origin.
struct FitBox {
    Interval d1, d2, q1, q2, k1, k2, theta;

    std::array<Interval, 7> axes() const { return {d1, d2, q1, q2, k1, k2, theta}; }
    bool contains(const ArmSpec& a) const {
        const auto& d = a.dynamics;
        return d1.contains(d.d1) && d2.contains(d.d2) && q1.contains(d.q1) && q2.contains(d.q2) &&
               k1.contains(d.k1) && k2.contains(d.k2) && theta.contains(a.theta);
    }
};

/// Arms shaped like fitted patients: coefficients uniform on the fit box, x0 = (0, 0).
inline std::vector<ArmSpec> generate_enrollment_cohort(std::size_t arms, std::uint64_t seed, const FitBox& box = {},
                                                       const RewardModelSpec& model = {}) {
    if (arms == 0) throw Error(ErrorCode::ConfigError, "cohort needs at least one arm");
    Rng rng = make_stream(seed, 0, 0, StreamPurpose::Cohort);
    std::vector<ArmSpec> out;
    out.reserve(arms);
    for (std::size_t i = 0; i < arms; ++i) {
        std::array<double, 7> v{};
        const auto axes = box.axes();
        for (std::size_t k = 0; k < 7; ++k) v[k] = axes[k].at(detail::unit_draw(rng));
        ArmSpec a;
        a.dynamics = {v[0], v[1], v[2], v[3], v[4], v[5]};
        a.theta = v[6];
        a.x0 = {0.0, 0.0};
        a.reward_model = model;
        out.push_back(a);
    }
    return out;
}

// ---------------------------------------------------------------- history CSV

struct HistoryRound {
    long period = 0;
    Action visited = 0;
    int enrolled = 0;
};

struct PatientHistoryRecord {
    long patient_id = 0;
    std::vector<HistoryRound> rounds;

    std::size_t visit_count() const {
        return static_cast<std::size_t>(
            std::count_if(rounds.begin(), rounds.end(), [](const HistoryRound& r) { return r.visited != 0; }));
    }
    std::vector<Action> visits() const {
        std::vector<Action> y;
        for (const auto& r : rounds) y.push_back(r.visited);
        return y;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= line.size(); ++k) {
        if (k == line.size() || line[k] == ',') {
            out.push_back(trim(line.substr(start, k - start)));
            start = k + 1;
        }
    }
    return out;
}

inline long parse_long(std::string_view s, std::size_t line, const char* field) {
    long v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end) {
        throw ParseError(line, std::string("bad ") + field + " '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace detail

/// Strict parse of `patient_id,period,visited,enrolled`. Periods must be
/// strictly increasing within a patient. Records come back ordered by id.
inline std::vector<PatientHistoryRecord> parse_history_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    ++lineno;
    const auto header = detail::split_commas(detail::trim(line));
    const std::vector<std::string_view> expected{"patient_id", "period", "visited", "enrolled"};
    if (header != expected) throw ParseError(1, "expected header patient_id,period,visited,enrolled");

    std::map<long, PatientHistoryRecord> by_id;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto f = detail::split_commas(line);
        if (f.size() != 4) {
            throw ParseError(lineno, "expected 4 fields, got " + std::to_string(f.size()));
        }
        const long id = detail::parse_long(f[0], lineno, "patient_id");
        const long period = detail::parse_long(f[1], lineno, "period");
        const long visited = detail::parse_long(f[2], lineno, "visited");
        const long enrolled = detail::parse_long(f[3], lineno, "enrolled");
        if ((visited != 0 && visited != 1) || (enrolled != 0 && enrolled != 1)) {
            throw ParseError(lineno, "visited/enrolled must be 0 or 1");
        }
        auto& rec = by_id[id];
        rec.patient_id = id;
        if (!rec.rounds.empty() && period <= rec.rounds.back().period) {
            throw Error(ErrorCode::OrderError, "line " + std::to_string(lineno) + ": period " + std::to_string(period) +
                                                   " for patient " + std::to_string(id) + " is not increasing");
        }
        rec.rounds.push_back({period, static_cast<Action>(visited), static_cast<int>(enrolled)});
    }
    std::vector<PatientHistoryRecord> out;
    out.reserve(by_id.size());
    for (auto& [id, rec] : by_id) out.push_back(std::move(rec));
    return out;
}

inline std::vector<PatientHistoryRecord> parse_history_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + path);
    return parse_history_csv(in);
}

inline std::vector<PatientHistoryRecord> filter_min_visits(std::vector<PatientHistoryRecord> records,
                                                           std::size_t min_visits) {
    std::erase_if(records, [&](const PatientHistoryRecord& r) { return r.visit_count() < min_visits; });
    return records;
}

// ---------------------------------------------------------------- grid fit

struct FittedPatient {
    long patient_id = 0;
    ArmSpec arm;
    double log_likelihood = 0.0;
};

inline std::vector<double> grid_ticks(const Interval& axis, std::size_t g) {
    if (g < 2) return {axis.lo};
    std::vector<double> t(g);
    for (std::size_t k = 0; k < g; ++k) t[k] = axis.lo + (axis.hi - axis.lo) * static_cast<double>(k) / (g - 1);
    return t;
}

/// Bernoulli log-likelihood of the enrolment outcomes under `arm`. Each period
/// is scored at the state before that period's visit decision takes effect.
inline double history_log_likelihood(const ArmSpec& arm, const PatientHistoryRecord& rec) {
    StateVec x = arm.x0;
    double ll = 0.0;
    for (const auto& r : rec.rounds) {
        const double z = arm.reward_model.index(arm.theta, x);
        ll += r.enrolled ? -std::log1p(std::exp(-z)) : -std::log1p(std::exp(z));
        x = step_dynamics(arm.dynamics, x, r.visited);
    }
    return ll;
}

/// Exhaustive G^7 lattice search over (d1, d2, q1, q2, k1, k2, theta) with
/// x0 = (0, 0). Ties go to the lexicographically smallest candidate.
inline FittedPatient fit_patient_grid(const PatientHistoryRecord& rec, std::size_t grid, const FitBox& box = {},
                                      const RewardModelSpec& model = {}) {
    if (rec.rounds.empty()) throw Error(ErrorCode::EmptyHistory, "patient " + std::to_string(rec.patient_id) + " has no rounds");
    if (grid == 0) throw Error(ErrorCode::ConfigError, "grid resolution must be >= 1");
    const std::size_t n = rec.rounds.size();
    const auto y = rec.visits();

    // Each state component depends only on its own (d, q, k) triple.
    auto component_paths = [&](const Interval& d, const Interval& q, const Interval& k) {
        std::vector<std::vector<double>> paths;
        for (double dv : grid_ticks(d, grid))
            for (double qv : grid_ticks(q, grid))
                for (double kv : grid_ticks(k, grid)) {
                    std::vector<double> p(n);
                    double v = 0.0;
                    for (std::size_t s = 0; s < n; ++s) {
                        p[s] = v;  // state the period is scored at
                        v = clamp01(dv * v + qv * (y[s] ? 1.0 : 0.0) + kv);
                    }
                    paths.push_back(std::move(p));
                }
        return paths;
    };
    // Lexicographic order is (d1, d2, q1, q2, k1, k2, theta); index the
    // component paths by their (d, q, k) position.
    const auto b_paths = component_paths(box.d1, box.q1, box.k1);
    const auto a_paths = component_paths(box.d2, box.q2, box.k2);
    const auto thetas = grid_ticks(box.theta, grid);
    const auto t_d1 = grid_ticks(box.d1, grid), t_d2 = grid_ticks(box.d2, grid), t_q1 = grid_ticks(box.q1, grid),
               t_q2 = grid_ticks(box.q2, grid), t_k1 = grid_ticks(box.k1, grid), t_k2 = grid_ticks(box.k2, grid);
    const std::size_t g = t_d1.size();
    auto tri = [g](std::size_t d, std::size_t q, std::size_t k) { return (d * g + q) * g + k; };

    double best = -std::numeric_limits<double>::infinity();
    std::array<std::size_t, 7> arg{};
    for (std::size_t i1 = 0; i1 < g; ++i1)
        for (std::size_t i2 = 0; i2 < g; ++i2)
            for (std::size_t i3 = 0; i3 < g; ++i3)
                for (std::size_t i4 = 0; i4 < g; ++i4)
                    for (std::size_t i5 = 0; i5 < g; ++i5)
                        for (std::size_t i6 = 0; i6 < g; ++i6) {
                            const auto& bp = b_paths[tri(i1, i3, i5)];
                            const auto& ap = a_paths[tri(i2, i4, i6)];
                            for (std::size_t i7 = 0; i7 < g; ++i7) {
                                const double base = model.nu * thetas[i7];
                                double ll = 0.0;
                                for (std::size_t s = 0; s < n; ++s) {
                                    const double z = base + model.omega_b * bp[s] + model.omega_a * ap[s];
                                    ll += rec.rounds[s].enrolled ? -std::log1p(std::exp(-z)) : -std::log1p(std::exp(z));
                                }
                                if (ll > best) {
                                    best = ll;
                                    arg = {i1, i2, i3, i4, i5, i6, i7};
                                }
                            }
                        }
    FittedPatient out;
    out.patient_id = rec.patient_id;
    out.arm.dynamics = {t_d1[arg[0]], t_d2[arg[1]], t_q1[arg[2]], t_q2[arg[3]], t_k1[arg[4]], t_k2[arg[5]]};
    out.arm.theta = thetas[arg[6]];
    out.arm.x0 = {0.0, 0.0};
    out.arm.reward_model = model;
    out.log_likelihood = best;
    return out;
}

namespace detail {

inline std::string fixed6(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(6) << (v == 0.0 ? 0.0 : v);
    return os.str();
}

}  // namespace detail

inline void write_fitted_cohort(std::ostream& out, const std::vector<FittedPatient>& patients) {
    out << "patient_id,d1,d2,q1,q2,k1,k2,theta,x0_b,x0_a,loglik\n";
    for (const auto& p : patients) {
        const auto& d = p.arm.dynamics;
        out << p.patient_id;
        for (double v : {d.d1, d.d2, d.q1, d.q2, d.k1, d.k2, p.arm.theta, p.arm.x0.b, p.arm.x0.a, p.log_likelihood}) {
            out << ',' << detail::fixed6(v);
        }
        out << '\n';
    }
}

inline std::vector<ArmSpec> read_fitted_cohort(std::istream& in, const RewardModelSpec& model = {}) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    if (detail::trim(line) != "patient_id,d1,d2,q1,q2,k1,k2,theta,x0_b,x0_a,loglik") {
        throw ParseError(1, "unexpected fitted-cohort header");
    }
    std::vector<ArmSpec> arms;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto f = detail::split_commas(line);
        if (f.size() != 11) throw ParseError(lineno, "expected 11 fields");
        std::array<double, 10> v{};
        for (std::size_t k = 0; k < 10; ++k) {
            const auto s = f[k + 1];
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v[k]);
            if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
                throw ParseError(lineno, "bad number '" + std::string(s) + "'");
            }
        }
        ArmSpec a;
        a.dynamics = {v[0], v[1], v[2], v[3], v[4], v[5]};
        a.theta = v[6];
        a.x0 = {v[7], v[8]};
        a.reward_model = model;
        if (!a.x0.in_box()) throw ParseError(lineno, "x0 outside [0,1]^2");
        arms.push_back(a);
    }
    return arms;
}

inline std::vector<ArmSpec> read_fitted_cohort(const std::string& path, const RewardModelSpec& model = {}) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open cohort file " + path);
    return read_fitted_cohort(in, model);
}

}  // namespace cobrah

#endif
