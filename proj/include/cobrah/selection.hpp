#ifndef COBRAH_SELECTION_HPP
#define COBRAH_SELECTION_HPP

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "error.hpp"
#include "model.hpp"

namespace cobrah {

namespace detail {

inline void check_capacity(std::size_t m, std::size_t capacity) {
    if (capacity == 0) throw Error(ErrorCode::ConfigError, "capacity must be >= 1");
    if (capacity > m) throw Error(ErrorCode::CapacityExceedsArms, "capacity exceeds number of arms");
}

/// Indices sorted by descending value, lowest index first among ties.
inline std::vector<std::size_t> rank_descending(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    return order;
}

}  // namespace detail

/// The `capacity` arms with the largest values.
inline SuperArm select_top_c(std::span<const double> values, std::size_t capacity) {
    detail::check_capacity(values.size(), capacity);
    const auto order = detail::rank_descending(values);
    return SuperArm(std::vector<std::size_t>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(capacity)));
}

/// Per-arm value pair: mean if visited, mean if not visited.
struct ActionValues {
    double visited = 0.0;
    double rested = 0.0;
    double gain() const { return visited - rested; }
};

/// Maximises sum_i g_i(y_i) subject to sum_i y_i <= capacity. Arms with a
/// negative gain are never selected, so fewer than `capacity` may be returned.
inline SuperArm select_ff(std::span<const ActionValues> values, std::size_t capacity) {
    detail::check_capacity(values.size(), capacity);
    std::vector<double> gains(values.size());
    std::transform(values.begin(), values.end(), gains.begin(), [](const ActionValues& v) { return v.gain(); });
    const auto order = detail::rank_descending(gains);
    std::vector<std::size_t> chosen;
    for (std::size_t i : order) {
        if (chosen.size() == capacity || !(gains[i] >= 0.0)) break;
        chosen.push_back(i);
    }
    return SuperArm(std::move(chosen));
}

}  // namespace cobrah

#endif
