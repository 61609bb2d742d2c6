#ifndef COBRAH_OBSERVATION_HPP
#define COBRAH_OBSERVATION_HPP

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "model.hpp"

namespace cobrah {

enum class FeedbackMode { SemiBandit, Full };

inline std::string_view to_string(FeedbackMode mode) { return mode == FeedbackMode::Full ? "FF" : "SB"; }

struct Observation {
    std::size_t round = 0;  // 1-based
    Action action = 0;
    bool observed = false;
    int reward = 0;  // meaningful only when observed
};

/// Complete per-arm history: one entry per elapsed round, so the arm's
/// dynamics can be rolled forward from x0 through every action taken.
class ObservationLog {
  public:
    ObservationLog() = default;
    explicit ObservationLog(std::size_t arm_id) : arm_id_(arm_id) {}

    /// Appends round size()+1. A reward is present iff the round was observed.
    void append(Action action, std::optional<int> reward) {
        if (reward && *reward != 0 && *reward != 1) throw Error(ErrorCode::InvalidMean, "reward must be 0 or 1");
        Observation o;
        o.round = entries_.size() + 1;
        o.action = action ? 1 : 0;
        o.observed = reward.has_value();
        o.reward = reward.value_or(0);
        entries_.push_back(o);
        actions_.push_back(o.action);
        if (o.action) ++pull_count_;
        if (o.observed) observed_rounds_.push_back(o.round);
    }

    /// Appends one round following the feedback rule: observed iff pulled (SB), always (FF).
    void record(FeedbackMode mode, Action action, int reward) {
        if (mode == FeedbackMode::Full || action) {
            append(action, reward);
        } else {
            append(action, std::nullopt);
        }
    }

    std::size_t arm_id() const { return arm_id_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<Observation>& entries() const { return entries_; }
    const Observation& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<Action>& actions() const { return actions_; }
    std::size_t pull_count() const { return pull_count_; }
    /// 1-based rounds with a recorded reward.
    const std::vector<std::size_t>& observed_rounds() const { return observed_rounds_; }
    std::size_t observed_count() const { return observed_rounds_.size(); }

  private:
    std::size_t arm_id_ = 0;
    std::vector<Observation> entries_;
    std::vector<Action> actions_;
    std::vector<std::size_t> observed_rounds_;
    std::size_t pull_count_ = 0;
};

}  // namespace cobrah

#endif
