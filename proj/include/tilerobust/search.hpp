#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>

#include "witness.hpp"

namespace tilerobust {

enum class CratesSearch { BestFirst, BreadthFirst };

struct SearchLimits {
    std::size_t max_states = 1'000'000;
    std::chrono::milliseconds max_time{10'000};
    bool deadlock_pruning = true;
    CratesSearch crates_search = CratesSearch::BestFirst;
    bool want_witness = true;
};

enum class Solvability { Solvable, Unsolvable, LimitExceeded };

inline std::string_view solvability_name(Solvability s) {
    switch (s) {
        case Solvability::Solvable: return "solvable";
        case Solvability::Unsolvable: return "unsolvable";
        case Solvability::LimitExceeded: return "limit-exceeded";
    }
    return "?";
}

struct SolveResult {
    Solvability status = Solvability::Unsolvable;
    std::optional<SolutionWitness> witness;
    std::size_t expanded = 0;
    std::size_t pushes = 0;  // crates only
    std::string note;

    [[nodiscard]] bool solvable() const { return status == Solvability::Solvable; }
    [[nodiscard]] bool decided() const { return status != Solvability::LimitExceeded; }
};

/// Tracks expansion count and wall-clock budget for one search.
class SearchBudget {
public:
    explicit SearchBudget(const SearchLimits& limits)
        : limits_(limits), deadline_(std::chrono::steady_clock::now() + limits.max_time) {}

    /// Counts one expansion; false once any limit is hit.
    bool spend() {
        ++expanded_;
        if (expanded_ > limits_.max_states) return false;
        if ((expanded_ & 1023) == 0 && std::chrono::steady_clock::now() > deadline_) return false;
        return true;
    }

    [[nodiscard]] std::size_t expanded() const { return expanded_; }

private:
    const SearchLimits& limits_;
    std::chrono::steady_clock::time_point deadline_;
    std::size_t expanded_ = 0;
};

enum class VerifyCode {
    Ok,
    KindMismatch,
    Empty,
    BadStart,
    IllegalMove,
    Discontinuity,
    GoalNotReached,
    ShapeMismatch,
};

inline std::string_view verify_code_name(VerifyCode c) {
    switch (c) {
        case VerifyCode::Ok: return "ok";
        case VerifyCode::KindMismatch: return "kind-mismatch";
        case VerifyCode::Empty: return "empty";
        case VerifyCode::BadStart: return "bad-start";
        case VerifyCode::IllegalMove: return "illegal-move";
        case VerifyCode::Discontinuity: return "discontinuity";
        case VerifyCode::GoalNotReached: return "goal-not-reached";
        case VerifyCode::ShapeMismatch: return "shape-mismatch";
    }
    return "?";
}

struct VerifyResult {
    VerifyCode code = VerifyCode::Ok;
    std::size_t step = 0;  // index of the offending edge/state

    [[nodiscard]] bool ok() const { return code == VerifyCode::Ok; }
    explicit operator bool() const { return ok(); }
};

}  // namespace tilerobust
