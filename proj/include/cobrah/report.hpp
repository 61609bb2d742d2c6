#ifndef COBRAH_REPORT_HPP
#define COBRAH_REPORT_HPP

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <map>
#include <memory>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cohort.hpp"
#include "config.hpp"
#include "error.hpp"
#include "simulation.hpp"

namespace cobrah {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- hashing

/// SHA-1 hex digest of `data`.
inline std::string sha1_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) {
        throw std::runtime_error("sha1 digest failed");
    }
    std::ostringstream os;
    for (unsigned int k = 0; k < len; ++k) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
    return os.str();
}

/// Hash of `content` as git would store it as a blob.
inline std::string git_blob_hash(std::string_view content) {
    std::string blob = "blob " + std::to_string(content.size());
    blob.push_back('\0');
    blob.append(content);
    return sha1_hex(blob);
}

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes to a sibling temporary and renames, so readers never see a partial file.
inline void write_file_atomic(const fs::path& p, std::string_view content) {
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, p);
}

// ---------------------------------------------------------------- CSV output

inline const char* feedback_label(FeedbackMode m) { return m == FeedbackMode::Full ? "ff" : "sb"; }

inline std::string regret_csv(const MetricsBundle& b) {
    std::ostringstream os;
    os << "round,policy,replication,inst_regret,cum_regret\n";
    for (std::size_t t = 0; t < b.horizon; ++t) {
        for (const auto& e : b.episodes) {
            os << t + 1 << ',' << e.policy << ',' << e.replication << ',' << detail::fixed6(e.inst_regret[t]) << ','
               << detail::fixed6(e.cum_regret[t]) << '\n';
        }
    }
    return os.str();
}

inline std::string reward_csv(const MetricsBundle& b) {
    std::ostringstream os;
    os << "round,policy,replication,cum_reward,longrun_avg,rolling_avg\n";
    for (std::size_t t = 0; t < b.horizon; ++t) {
        for (const auto& e : b.episodes) {
            os << t + 1 << ',' << e.policy << ',' << e.replication << ',' << detail::fixed6(e.cum_reward[t]) << ','
               << detail::fixed6(e.longrun_avg[t]) << ',' << detail::fixed6(e.rolling_avg[t]) << '\n';
        }
    }
    return os.str();
}

inline std::string enrollment_csv(const MetricsBundle& b) {
    std::ostringstream os;
    os << "round,policy,replication,enrolled_count,enrolled_frac,rolling5\n";
    for (std::size_t t = 0; t < b.horizon; ++t) {
        for (const auto& e : b.episodes) {
            os << t + 1 << ',' << e.policy << ',' << e.replication << ','
               << static_cast<long long>(e.enrolled_count[t]) << ',' << detail::fixed6(e.enrolled_frac[t]) << ','
               << detail::fixed6(e.rolling_enrollment[t]) << '\n';
        }
    }
    return os.str();
}

/// Visit counts after initialization, averaged over replications.
inline std::string visits_csv(const MetricsBundle& b) {
    std::ostringstream os;
    os << "policy,arm,visit_count\n";
    for (const auto& s : b.summaries) {
        for (std::size_t i = 0; i < s.mean_visits.size(); ++i) {
            os << s.name << ',' << i << ',' << detail::fixed6(s.mean_visits[i]) << '\n';
        }
    }
    return os.str();
}

/// Inter-visit intervals after initialization, pooled over replications.
inline std::string intervals_csv(const MetricsBundle& b) {
    std::ostringstream os;
    os << "policy,arm,interval\n";
    for (const auto& e : b.episodes) {
        for (std::size_t i = 0; i < e.intervals.size(); ++i) {
            for (auto gap : e.intervals[i]) os << e.policy << ',' << i << ',' << gap << '\n';
        }
    }
    return os.str();
}

inline std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RunInfo {
    ConfigDocument config;
    ExperimentConfig experiment;
    std::chrono::system_clock::time_point started, finished;
};

inline nlohmann::json build_manifest(const RunInfo& info, const MetricsBundle& b, const fs::path& dir,
                                     const std::vector<std::string>& files) {
    using nlohmann::json;
    json cfg = json::object();
    for (const auto& [key, value] : info.config.values) {
        const auto dot = key.find('.');
        cfg[key.substr(0, dot)][key.substr(dot + 1)] = value;
    }
    const auto& ex = info.experiment;
    json reps = json::array();
    for (std::size_t r = 0; r < ex.replications; ++r) {
        reps.push_back({{"replication", r}, {"policy_seed", derive_seed(ex.seed, r, 0, StreamPurpose::Policy)}});
    }
    json policies = json::array();
    for (const auto& s : b.summaries) policies.push_back({{"id", s.policy}, {"name", s.name}});
    json inventory = json::array();
    for (const auto& f : files) {
        const auto content = read_file(dir / f);
        inventory.push_back({{"name", f}, {"bytes", content.size()}, {"sha1", sha1_hex(content)}});
    }
    return json{
        {"config", cfg},
        {"config_hash", git_blob_hash(info.config.canonical())},
        {"seeds", {{"base", ex.seed}, {"cohort", ex.cohort.seed.value_or(ex.seed)}, {"replications", reps}}},
        {"feedback", feedback_label(ex.feedback)},
        {"arms", b.arms},
        {"capacity", b.capacity},
        {"init_rounds", b.init_rounds},
        {"horizon", b.horizon},
        {"replications", ex.replications},
        {"policies", policies},
        {"started_at", utc_timestamp(info.started)},
        {"finished_at", utc_timestamp(info.finished)},
        {"files", inventory},
    };
}

/// Writes every CSV, then the manifest; returns the written file names.
inline std::vector<std::string> write_run(const fs::path& dir, const RunInfo& info, const MetricsBundle& b) {
    fs::create_directories(dir);
    std::vector<std::pair<std::string, std::string>> outputs{
        {"regret.csv", regret_csv(b)},
        {"reward.csv", reward_csv(b)},
    };
    outputs.emplace_back("enrollment.csv", enrollment_csv(b));
    outputs.emplace_back("visits.csv", visits_csv(b));
    outputs.emplace_back("intervals.csv", intervals_csv(b));
    std::vector<std::string> names;
    for (const auto& [name, content] : outputs) {
        write_file_atomic(dir / name, content);
        names.push_back(name);
    }
    write_file_atomic(dir / "manifest.json", build_manifest(info, b, dir, names).dump(2) + "\n");
    names.push_back("manifest.json");
    return names;
}

// ---------------------------------------------------------------- CSV input

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw Error(ErrorCode::ConfigError, "missing column " + std::string(name));
        return static_cast<std::size_t>(it - header.begin());
    }
};

/// Reads a metrics CSV with the given header. Missing file, wrong header or no
/// data rows raise ConfigError naming the file.
inline CsvTable read_metrics_csv(const fs::path& p, const std::vector<std::string>& expected, bool allow_empty = false) {
    std::ifstream in(p);
    if (!in) throw Error(ErrorCode::ConfigError, "missing metrics file " + p.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::ConfigError, "empty metrics file " + p.string());
    for (auto f : detail::split_commas(detail::trim(line))) t.header.emplace_back(f);
    if (t.header != expected) throw Error(ErrorCode::ConfigError, "unexpected header in " + p.string());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> row;
        for (auto f : detail::split_commas(line)) row.emplace_back(f);
        if (row.size() != expected.size()) {
            throw Error(ErrorCode::ConfigError, p.string() + " line " + std::to_string(lineno) + ": wrong field count");
        }
        t.rows.push_back(std::move(row));
    }
    if (t.rows.empty() && !allow_empty) throw Error(ErrorCode::ConfigError, "no data rows in " + p.string());
    return t;
}

// ---------------------------------------------------------------- SVG

namespace svg {

inline std::string num(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << (std::abs(v) < 0.005 ? 0.0 : v);
    return os.str();
}

inline std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

inline std::string tick_label(double v) {
    std::ostringstream os;
    os << std::setprecision(4) << (std::abs(v) < 1e-12 ? 0.0 : v);
    return os.str();
}

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> p{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                            "#9467bd", "#8c564b", "#e377c2", "#17becf"};
    return p;
}

/// "Nice" step for roughly `n` ticks over [lo, hi].
inline double nice_step(double lo, double hi, int n) {
    const double raw = (hi - lo) / n;
    if (!(raw > 0.0)) return 1.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double f : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (f * mag >= raw) return f * mag;
    }
    return 10.0 * mag;
}

struct Series {
    std::string label;
    std::vector<double> x, y;
    std::vector<double> lo, hi;  // optional band
    bool dashed = false;
    std::size_t color = 0;
};

struct Bars {
    std::string label;
    std::vector<double> heights;  // one per bin
    std::size_t color = 0;
};

/// Minimal static chart: line series with optional bands, or grouped bars.
class Chart {
  public:
    Chart(std::string title, std::string xlabel, std::string ylabel)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

    void add(Series s) { series_.push_back(std::move(s)); }
    void set_bins(std::vector<std::string> labels) { bin_labels_ = std::move(labels); }
    void add(Bars b) { bars_.push_back(std::move(b)); }

    std::string render() const {
        double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
        bounds(x0, x1, y0, y1);
        std::ostringstream os;
        os << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << W << R"(" height=")" << H << R"(" viewBox="0 0 )"
           << W << ' ' << H << R"(" font-family="sans-serif" font-size="12">)" << '\n';
        os << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n';
        os << R"(<text x=")" << W / 2 << R"(" y="22" text-anchor="middle" font-size="15">)" << escape(title_) << "</text>\n";
        auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
        auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

        // axes and ticks
        os << R"(<g stroke="#444" fill="none">)";
        os << R"(<line x1=")" << L << R"(" y1=")" << H - B << R"(" x2=")" << W - R << R"(" y2=")" << H - B << R"("/>)";
        os << R"(<line x1=")" << L << R"(" y1=")" << T << R"(" x2=")" << L << R"(" y2=")" << H - B << R"("/>)";
        os << "</g>\n";
        const double ys = nice_step(y0, y1, 5);
        for (double v = std::ceil(y0 / ys) * ys; v <= y1 + 1e-9 * ys; v += ys) {
            os << R"(<line x1=")" << L << R"(" x2=")" << W - R << R"(" y1=")" << num(py(v)) << R"(" y2=")" << num(py(v))
               << R"(" stroke="#ddd"/>)";
            os << R"(<text x=")" << L - 6 << R"(" y=")" << num(py(v) + 4) << R"(" text-anchor="end">)" << tick_label(v)
               << "</text>\n";
        }
        if (bin_labels_.empty()) {
            const double xs = nice_step(x0, x1, 6);
            for (double v = std::ceil(x0 / xs) * xs; v <= x1 + 1e-9 * xs; v += xs) {
                os << R"(<text x=")" << num(px(v)) << R"(" y=")" << H - B + 16 << R"(" text-anchor="middle">)"
                   << tick_label(v) << "</text>\n";
            }
        } else {
            const std::size_t every = std::max<std::size_t>(1, bin_labels_.size() / 10);
            for (std::size_t k = 0; k < bin_labels_.size(); k += every) {
                os << R"(<text x=")" << num(px(static_cast<double>(k) + 0.5)) << R"(" y=")" << H - B + 16
                   << R"(" text-anchor="middle">)" << escape(bin_labels_[k]) << "</text>\n";
            }
        }
        os << R"(<text x=")" << (L + W - R) / 2 << R"(" y=")" << H - 12 << R"(" text-anchor="middle">)" << escape(xlabel_)
           << "</text>\n";
        os << R"(<text transform="translate(16 )" << (T + H - B) / 2 << R"x() rotate(-90)" text-anchor="middle">)x"
           << escape(ylabel_) << "</text>\n";

        // bands first so lines sit on top
        for (const auto& s : series_) {
            if (s.lo.empty()) continue;
            os << R"(<polygon fill=")" << color(s.color) << R"(" fill-opacity="0.18" stroke="none" points=")";
            for (std::size_t k = 0; k < s.x.size(); ++k) os << num(px(s.x[k])) << ',' << num(py(s.hi[k])) << ' ';
            for (std::size_t k = s.x.size(); k-- > 0;) os << num(px(s.x[k])) << ',' << num(py(s.lo[k])) << ' ';
            os << "\"/>\n";
        }
        for (const auto& s : series_) {
            os << R"(<polyline fill="none" stroke=")" << color(s.color) << R"(" stroke-width="1.6")"
               << (s.dashed ? R"( stroke-dasharray="5 3")" : "") << R"( points=")";
            for (std::size_t k = 0; k < s.x.size(); ++k) os << num(px(s.x[k])) << ',' << num(py(s.y[k])) << ' ';
            os << "\"/>\n";
        }
        if (!bars_.empty()) {
            const double group = 0.8 / static_cast<double>(bars_.size());
            for (std::size_t p = 0; p < bars_.size(); ++p) {
                for (std::size_t k = 0; k < bars_[p].heights.size(); ++k) {
                    const double h = bars_[p].heights[k];
                    if (!(h > 0.0)) continue;
                    const double left = static_cast<double>(k) + 0.1 + group * static_cast<double>(p);
                    os << R"(<rect x=")" << num(px(left)) << R"(" y=")" << num(py(h)) << R"(" width=")"
                       << num(px(left + group) - px(left)) << R"(" height=")" << num(py(y0) - py(h)) << R"(" fill=")"
                       << color(bars_[p].color) << R"("/>)" << '\n';
                }
            }
        }

        // legend
        std::vector<std::pair<std::string, std::pair<std::size_t, bool>>> entries;
        for (const auto& s : series_) entries.push_back({s.label, {s.color, s.dashed}});
        for (const auto& b : bars_) entries.push_back({b.label, {b.color, false}});
        double ly = T + 8;
        if (!entries.empty()) {
            os << R"(<rect x=")" << W - R - 196 << R"(" y=")" << T - 4 << R"(" width="194" height=")"
               << 16 * entries.size() + 6 << R"(" fill="white" fill-opacity="0.85" stroke="#ccc"/>)" << '\n';
        }
        for (const auto& [label, style] : entries) {
            os << R"(<line x1=")" << W - R - 190 << R"(" x2=")" << W - R - 164 << R"(" y1=")" << num(ly) << R"(" y2=")"
               << num(ly) << R"(" stroke=")" << color(style.first) << R"(" stroke-width="3")"
               << (style.second ? R"( stroke-dasharray="5 3")" : "") << "/>";
            os << R"(<text x=")" << W - R - 158 << R"(" y=")" << num(ly + 4) << R"(">)" << escape(label) << "</text>\n";
            ly += 16;
        }
        os << "</svg>\n";
        return os.str();
    }

  private:
    static constexpr int W = 760, H = 460, L = 70, R = 20, T = 40, B = 50;

    static std::string color(std::size_t k) { return palette()[k % palette().size()]; }

    void bounds(double& x0, double& x1, double& y0, double& y1) const {
        bool any = false;
        double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
        auto take = [&](double x, double y) {
            if (!any) { xmin = xmax = x; ymin = ymax = y; any = true; }
            xmin = std::min(xmin, x); xmax = std::max(xmax, x);
            ymin = std::min(ymin, y); ymax = std::max(ymax, y);
        };
        for (const auto& s : series_) {
            for (std::size_t k = 0; k < s.x.size(); ++k) {
                take(s.x[k], s.y[k]);
                if (!s.lo.empty()) { take(s.x[k], s.lo[k]); take(s.x[k], s.hi[k]); }
            }
        }
        if (!bars_.empty()) {
            xmin = 0;
            xmax = static_cast<double>(std::max<std::size_t>(1, bin_labels_.size()));
            ymin = 0;
            ymax = 0;
            for (const auto& b : bars_) for (double h : b.heights) ymax = std::max(ymax, h);
            any = true;
        }
        if (ymin > 0 && bars_.empty()) ymin = std::min(ymin, 0.0);
        if (xmax <= xmin) xmax = xmin + 1;
        if (ymax <= ymin) ymax = ymin + 1;
        const double pad = 0.05 * (ymax - ymin);
        x0 = xmin; x1 = xmax; y0 = ymin < 0 ? ymin - pad : ymin; y1 = ymax + pad;
    }

    std::string title_, xlabel_, ylabel_;
    std::vector<Series> series_;
    std::vector<Bars> bars_;
    std::vector<std::string> bin_labels_;
};

}  // namespace svg

// ---------------------------------------------------------------- report

namespace detail {

inline double to_double(const std::string& s, const std::string& file) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::ConfigError, "bad number '" + s + "' in " + file);
    }
    return v;
}

/// policy -> round -> values across replications, keeping first-seen policy order.
struct RoundSeries {
    std::vector<std::string> order;
    std::map<std::string, std::map<long, std::vector<double>>> data;

    void add(const std::string& policy, long round, double v) {
        if (!data.contains(policy)) order.push_back(policy);
        data[policy][round].push_back(v);
    }
};

inline RoundSeries collect(const CsvTable& t, const std::string& value_col, const std::string& file) {
    RoundSeries rs;
    const auto rc = t.column("round"), pc = t.column("policy"), vc = t.column(value_col);
    for (const auto& row : t.rows) {
        rs.add(row[pc], static_cast<long>(to_double(row[rc], file)), to_double(row[vc], file));
    }
    return rs;
}

inline svg::Series mean_series(const std::string& label, const std::map<long, std::vector<double>>& by_round,
                               bool band) {
    svg::Series s;
    s.label = label;
    for (const auto& [round, vals] : by_round) {
        const double n = static_cast<double>(vals.size());
        double mu = 0.0;
        for (double v : vals) mu += v;
        mu /= n;
        double ss = 0.0;
        for (double v : vals) ss += (v - mu) * (v - mu);
        const double sd = vals.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        s.x.push_back(static_cast<double>(round));
        s.y.push_back(mu);
        if (band) {
            s.lo.push_back(mu - sd);
            s.hi.push_back(mu + sd);
        }
    }
    return s;
}

/// Equal-width bins over [0, max]; integer-valued data gets unit bins when few enough.
inline std::vector<double> bin_edges(double max_value, std::size_t max_bins) {
    const double top = std::max(1.0, std::ceil(max_value));
    const std::size_t bins = std::min<std::size_t>(max_bins, static_cast<std::size_t>(top) + 1);
    const double width = (top + 1.0) / static_cast<double>(bins);
    std::vector<double> edges(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k) edges[k] = width * static_cast<double>(k);
    return edges;
}

inline std::size_t bin_of(double v, const std::vector<double>& edges) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - edges.begin() - 1));
    return std::min(k, edges.size() - 2);
}

inline std::vector<std::string> bin_labels(const std::vector<double>& edges) {
    std::vector<std::string> out;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) out.push_back(svg::tick_label(std::round(edges[k] * 10) / 10));
    return out;
}

}  // namespace detail

/// Policy legend order from the manifest: resolved names.
inline std::vector<std::string> manifest_policies(const nlohmann::json& m) {
    std::vector<std::string> out;
    for (const auto& p : m.at("policies")) out.push_back(p.at("name").get<std::string>());
    return out;
}

/// Renders every chart for a run directory; returns the written SVG names.
inline std::vector<std::string> write_report(const fs::path& dir) {
    const fs::path manifest_path = dir / "manifest.json";
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, "bad manifest " + manifest_path.string() + ": " + e.what());
    }
    const auto policies = manifest_policies(manifest);
    auto color_of = [&](const std::string& p) {
        const auto it = std::find(policies.begin(), policies.end(), p);
        return static_cast<std::size_t>(it - policies.begin());
    };

    const auto regret = read_metrics_csv(dir / "regret.csv", {"round", "policy", "replication", "inst_regret", "cum_regret"});
    const auto reward =
        read_metrics_csv(dir / "reward.csv", {"round", "policy", "replication", "cum_reward", "longrun_avg", "rolling_avg"});
    const auto visits = read_metrics_csv(dir / "visits.csv", {"policy", "arm", "visit_count"});
    const auto intervals = read_metrics_csv(dir / "intervals.csv", {"policy", "arm", "interval"}, true);
    const auto enrollment = read_metrics_csv(
        dir / "enrollment.csv", {"round", "policy", "replication", "enrolled_count", "enrolled_frac", "rolling5"});

    std::vector<std::pair<std::string, std::string>> charts;
    {
        svg::Chart c("Cumulative regret (mean +/- sd)", "round", "cumulative regret");
        const auto rs = detail::collect(regret, "cum_regret", "regret.csv");
        for (const auto& p : rs.order) {
            auto s = detail::mean_series(p, rs.data.at(p), true);
            s.color = color_of(p);
            c.add(std::move(s));
        }
        charts.emplace_back("regret.svg", c.render());
    }
    {
        svg::Chart c("Average reward", "round", "reward per round");
        const auto lr = detail::collect(reward, "longrun_avg", "reward.csv");
        const auto ro = detail::collect(reward, "rolling_avg", "reward.csv");
        for (const auto& p : lr.order) {
            auto s = detail::mean_series(p + " long-run", lr.data.at(p), false);
            s.color = color_of(p);
            c.add(std::move(s));
            auto r = detail::mean_series(p + " rolling", ro.data.at(p), false);
            r.color = color_of(p);
            r.dashed = true;
            c.add(std::move(r));
        }
        charts.emplace_back("reward.svg", c.render());
    }
    {
        svg::Chart c("Rolling enrollment", "round", "enrolled fraction (rolling)");
        const auto en = detail::collect(enrollment, "rolling5", "enrollment.csv");
        for (const auto& p : en.order) {
            auto s = detail::mean_series(p, en.data.at(p), false);
            s.color = color_of(p);
            c.add(std::move(s));
        }
        charts.emplace_back("enrollment.svg", c.render());
    }
    auto histogram = [&](const CsvTable& t, const std::string& col, const std::string& file, bool log_counts,
                         const std::string& title, const std::string& xlabel, const std::string& ylabel) {
        const auto pc = t.column("policy"), vc = t.column(col);
        std::vector<std::string> order;
        std::map<std::string, std::vector<double>> values;
        double top = 0.0;
        for (const auto& row : t.rows) {
            if (!values.contains(row[pc])) order.push_back(row[pc]);
            const double v = detail::to_double(row[vc], file);
            values[row[pc]].push_back(v);
            top = std::max(top, v);
        }
        const auto edges = detail::bin_edges(top, 40);
        svg::Chart c(title, xlabel, ylabel);
        c.set_bins(detail::bin_labels(edges));
        for (const auto& p : order) {
            svg::Bars b;
            b.label = p;
            b.color = color_of(p);
            b.heights.assign(edges.size() - 1, 0.0);
            for (double v : values[p]) b.heights[detail::bin_of(v, edges)] += 1.0;
            if (log_counts) {
                for (auto& h : b.heights) h = h > 0.0 ? std::log10(1.0 + h) : 0.0;
            }
            c.add(std::move(b));
        }
        return c.render();
    };
    charts.emplace_back("visit_hist.svg", histogram(visits, "visit_count", "visits.csv", true, "Visits per participant",
                                                    "visit count (mean over replications)", "log10(1 + participants)"));
    charts.emplace_back("interval_hist.svg", histogram(intervals, "interval", "intervals.csv", false,
                                                       "Intervals between consecutive visits", "interval (rounds)",
                                                       "count"));
    std::vector<std::string> names;
    for (const auto& [name, content] : charts) {
        write_file_atomic(dir / name, content);
        names.push_back(name);
    }
    return names;
}

}  // namespace cobrah

#endif
