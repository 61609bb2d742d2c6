#ifndef COBRAH_CONFIG_HPP
#define COBRAH_CONFIG_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "cohort.hpp"
#include "error.hpp"
#include "simulation.hpp"

namespace cobrah {

/// Flat `section.key -> value` view of a config file. Keys before the first
/// `[section]` header belong to `experiment`.
struct ConfigDocument {
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.contains(key); }

    /// Canonical text: one `section.key = value` per line, sorted by key.
    std::string canonical() const {
        std::string out;
        for (const auto& [k, v] : values) out += k + " = " + v + "\n";
        return out;
    }
};

namespace detail {

inline std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline bool valid_name(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

}  // namespace detail

inline ConfigDocument parse_config(std::istream& in) {
    ConfigDocument doc;
    std::string section = "experiment";
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(lineno, "unterminated section header");
            const auto name = detail::trim(line.substr(1, line.size() - 2));
            if (!detail::valid_name(name)) throw ParseError(lineno, "bad section name");
            section = detail::lower(name);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(lineno, "expected key = value");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        if (!detail::valid_name(key)) throw ParseError(lineno, "bad key '" + std::string(key) + "'");
        const std::string full = section + "." + detail::lower(key);
        if (doc.values.contains(full)) throw ParseError(lineno, "duplicate key " + full);
        doc.values[full] = std::string(value);
    }
    return doc;
}

inline ConfigDocument parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline ConfigDocument load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file " + path);
    try {
        return parse_config(in);
    } catch (const ParseError& e) {
        throw Error(ErrorCode::ConfigError, path + ": " + e.what());
    }
}

/// Applies `section.key=value`; a bare key means `experiment.key`.
inline void apply_override(ConfigDocument& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw Error(ErrorCode::ConfigError, "override must look like key=value: " + std::string(assignment));
    }
    std::string key = detail::lower(detail::trim(assignment.substr(0, eq)));
    if (!detail::valid_name(key)) throw Error(ErrorCode::ConfigError, "bad override key '" + key + "'");
    if (key.find('.') == std::string::npos) key = "experiment." + key;
    doc.values[key] = std::string(detail::trim(assignment.substr(eq + 1)));
}

namespace detail {

inline double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (v.empty() || ec != std::errc() || ptr != end) throw Error(ErrorCode::ConfigError, key + ": not a number '" + v + "'");
    return out;
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (v.empty() || ec != std::errc() || ptr != end) {
        throw Error(ErrorCode::ConfigError, key + ": not a non-negative integer '" + v + "'");
    }
    return out;
}

inline Interval parse_interval(const std::string& key, const std::string& v) {
    const auto parts = split_commas(v);
    if (parts.size() != 2) throw Error(ErrorCode::ConfigError, key + ": expected 'lo, hi'");
    Interval r{parse_double(key, std::string(parts[0])), parse_double(key, std::string(parts[1]))};
    if (!(r.lo <= r.hi)) throw Error(ErrorCode::ConfigError, key + ": lo exceeds hi");
    return r;
}

inline std::vector<std::string> parse_list(const std::string& v) {
    std::vector<std::string> out;
    for (auto p : split_commas(v)) {
        if (!p.empty()) out.emplace_back(p);
    }
    return out;
}

}  // namespace detail

/// Builds an ExperimentConfig; unknown keys and malformed values raise ConfigError.
inline ExperimentConfig to_experiment_config(const ConfigDocument& doc) {
    ExperimentConfig cfg;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    auto num = [](auto& field) -> Setter {
        return [&field](const std::string& k, const std::string& v) {
            field = static_cast<std::remove_reference_t<decltype(field)>>(detail::parse_unsigned(k, v));
        };
    };
    auto real = [](double& field) -> Setter {
        return [&field](const std::string& k, const std::string& v) { field = detail::parse_double(k, v); };
    };
    auto interval = [](Interval& field) -> Setter {
        return [&field](const std::string& k, const std::string& v) { field = detail::parse_interval(k, v); };
    };
    auto& co = cfg.options.cobrah;
    auto& conc = co.concentration;
    auto solver_both = [&co](auto member) -> Setter {
        return [&co, member](const std::string& k, const std::string& v) {
            using T = std::remove_reference_t<decltype(co.mle_solver.*member)>;
            if constexpr (std::is_integral_v<T>) {
                co.mle_solver.*member = static_cast<T>(detail::parse_unsigned(k, v));
            } else {
                co.mle_solver.*member = detail::parse_double(k, v);
            }
            co.ucb_solver.*member = co.mle_solver.*member;
        };
    };

    const std::map<std::string, Setter> setters{
        {"experiment.horizon", num(cfg.horizon)},
        {"experiment.replications", num(cfg.replications)},
        {"experiment.seed", num(cfg.seed)},
        {"experiment.burn_in", num(cfg.burn_in)},
        {"experiment.reward_window", num(cfg.reward_window)},
        {"experiment.enrollment_window", num(cfg.enrollment_window)},
        {"experiment.threads", num(cfg.threads)},
        {"experiment.out", [](const std::string&, const std::string&) {}},  // consumed by the CLI
        {"experiment.capacity",
         [&](const std::string& k, const std::string& v) { cfg.capacity = detail::parse_unsigned(k, v); }},
        {"experiment.budget",
         [&](const std::string& k, const std::string& v) { cfg.budget_fraction = detail::parse_double(k, v); }},
        {"experiment.feedback",
         [&](const std::string& k, const std::string& v) {
             const auto s = detail::lower(v);
             if (s == "sb" || s == "semi-bandit") cfg.feedback = FeedbackMode::SemiBandit;
             else if (s == "ff" || s == "full") cfg.feedback = FeedbackMode::Full;
             else throw Error(ErrorCode::ConfigError, k + ": expected sb or ff");
         }},
        {"experiment.policies",
         [&](const std::string& k, const std::string& v) {
             cfg.policies = detail::parse_list(v);
             if (cfg.policies.empty()) throw Error(ErrorCode::ConfigError, k + ": empty policy list");
         }},

        {"cohort.kind",
         [&](const std::string& k, const std::string& v) {
             const auto s = detail::lower(v);
             if (s == "synthetic") cfg.cohort.kind = CohortKind::Synthetic;
             else if (s == "enrollment") cfg.cohort.kind = CohortKind::Enrollment;
             else if (s == "fitted") cfg.cohort.kind = CohortKind::Fitted;
             else throw Error(ErrorCode::ConfigError, k + ": expected synthetic, enrollment or fitted");
         }},
        {"cohort.arms", num(cfg.cohort.arms)},
        {"cohort.seed", [&](const std::string& k, const std::string& v) { cfg.cohort.seed = detail::parse_unsigned(k, v); }},
        {"cohort.file", [&](const std::string&, const std::string& v) { cfg.cohort.file = v; }},
        {"cohort.decay", interval(cfg.cohort.synthetic.decay)},
        {"cohort.visit_effect", interval(cfg.cohort.synthetic.visit_effect)},
        {"cohort.drift", interval(cfg.cohort.synthetic.drift)},
        {"cohort.initial_state", interval(cfg.cohort.synthetic.initial_state)},
        {"cohort.theta", interval(cfg.cohort.synthetic.theta)},
        {"cohort.box_d1", interval(cfg.cohort.box.d1)},
        {"cohort.box_d2", interval(cfg.cohort.box.d2)},
        {"cohort.box_q1", interval(cfg.cohort.box.q1)},
        {"cohort.box_q2", interval(cfg.cohort.box.q2)},
        {"cohort.box_k1", interval(cfg.cohort.box.k1)},
        {"cohort.box_k2", interval(cfg.cohort.box.k2)},
        {"cohort.box_theta", interval(cfg.cohort.box.theta)},

        {"model.nu", real(cfg.reward_model.nu)},
        {"model.omega_b", real(cfg.reward_model.omega_b)},
        {"model.omega_a", real(cfg.reward_model.omega_a)},

        {"cobrah.eta", real(co.tuned.eta)},
        {"cobrah.first_fit_lattice", num(co.first_fit_lattice)},
        {"cobrah.lattice", solver_both(&SolverConfig::lattice_per_axis)},
        {"cobrah.max_iterations", solver_both(&SolverConfig::max_iterations)},
        {"cobrah.penalty_rounds", solver_both(&SolverConfig::penalty_rounds)},
        {"cobrah.tolerance", solver_both(&SolverConfig::tolerance)},
        {"cobrah.initial_step", solver_both(&SolverConfig::initial_step)},
        {"cobrah.gradient",
         [&](const std::string& k, const std::string& v) {
             const auto s = detail::lower(v);
             GradientMode g{};
             if (s == "sensitivity") g = GradientMode::Sensitivity;
             else if (s == "central") g = GradientMode::CentralDifference;
             else throw Error(ErrorCode::ConfigError, k + ": expected sensitivity or central");
             co.mle_solver.gradient = co.ucb_solver.gradient = g;
         }},
        {"cobrah.lipschitz_dynamics", real(conc.lipschitz_dynamics)},
        {"cobrah.lipschitz_llr", real(conc.lipschitz_llr)},
        {"cobrah.lipschitz_mean", real(conc.lipschitz_mean)},
        {"cobrah.sigma", real(conc.sigma)},
        {"cobrah.diam_x", real(conc.diam_x)},
        {"cobrah.diam_x_theta", real(conc.diam_x_theta)},
        {"cobrah.dim_x", num(conc.dim_x)},
        {"cobrah.dim_theta", num(conc.dim_theta)},

        {"sw-ucb.window", [&](const std::string& k, const std::string& v) {
             const auto w = detail::parse_unsigned(k, v);
             if (w == 0) throw Error(ErrorCode::ConfigError, k + ": window must be >= 1");
             cfg.options.window = w;
         }},
    };

    for (const auto& [key, value] : doc.values) {
        const auto it = setters.find(key);
        if (it == setters.end()) throw Error(ErrorCode::ConfigError, "unknown config key " + key);
        it->second(key, value);
    }
    if (!(co.tuned.eta > 0.0)) throw Error(ErrorCode::ConfigError, "cobrah.eta must be positive");
    if (!conc.valid()) throw Error(ErrorCode::ConfigError, "invalid concentration constants");
    return cfg;
}

/// Output directory from the config, if set.
inline std::string config_output_dir(const ConfigDocument& doc, const std::string& fallback) {
    const auto it = doc.values.find("experiment.out");
    return it == doc.values.end() ? fallback : it->second;
}

}  // namespace cobrah

#endif
