#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "game_def.hpp"
#include "level.hpp"
#include "mechanics.hpp"
#include "patterns.hpp"
#include "rng.hpp"
#include "wfc.hpp"

namespace tilerobust {

enum class Label { Solvable, Unsolvable };

inline std::string_view label_name(Label l) { return l == Label::Solvable ? "solvable" : "unsolvable"; }

inline Label parse_label(std::string_view s) {
    if (s == "solvable") return Label::Solvable;
    if (s == "unsolvable") return Label::Unsolvable;
    throw ConfigError("unknown label: " + std::string(s));
}

struct GenSpec {
    int rows = 16;
    int cols = 16;
    Label target = Label::Solvable;
    std::uint64_t seed = 0;
    int retry_budget = 500;
    std::map<char, int> required_specials;  // exact counts; listed symbols appear nowhere else
    SearchLimits limits{};
    int max_backtracks = 4000;
};

struct GenResult {
    Level level;
    std::optional<SolutionWitness> witness;
    int attempts = 0;
};

class GenerationError : public Error {
public:
    GenerationError(const std::string& what, int attempts) : Error(what), attempts_(attempts) {}
    [[nodiscard]] int attempts() const { return attempts_; }

private:
    int attempts_;
};

/// Builds candidate grids whose every window is a known pattern, with the
/// required special tiles placed first.
class CandidateBuilder {
public:
    CandidateBuilder(const GameDef& game, const PatternSet& ps, int rows, int cols)
        : game_(game), rows_(rows), cols_(cols), prop_(ps, terrain_symbols(game), rows, cols) {
        if (ps.game_id != game.game_id) throw ConfigError("pattern set belongs to " + ps.game_id);
        feasible_ = prop_.initial(start_);
        for (char s : prop_.symbols()) {
            auto it = ps.counts.find(s);
            const double mid = it == ps.counts.end() ? 0.0 : 0.5 * (it->second.first + it->second.second);
            weights_.push_back(std::max(mid, 1e-3));
        }
    }

    [[nodiscard]] bool feasible() const { return feasible_; }

    /// One construction attempt. Returns nothing when propagation or the
    /// backtracking budget gives up.
    std::optional<Level> build(CounterRng& rng, const std::map<char, int>& specials, int max_backtracks) const {
        if (!feasible_) return std::nullopt;
        WindowPropagator::State st = start_;
        std::vector<std::pair<int, char>> overlays;
        std::vector<char> taken(static_cast<std::size_t>(rows_) * cols_, 0);

        for (auto [sym, n] : specials) {
            const bool overlay = game_.pattern_base.contains(sym);
            const int idx = prop_.symbol_index(game_.window_symbol(sym));
            if (idx < 0) throw ConfigError(std::string("special symbol '") + sym + "' has no terrain class");
            for (int placed = 0; placed < n; ++placed) {
                if (!place_one(st, rng, idx, taken)) return std::nullopt;
                if (overlay) overlays.emplace_back(last_cell_, sym);
            }
            if (!overlay) {
                for (int c = 0; c < prop_.cells(); ++c) {
                    if (taken[c]) continue;
                    if (!prop_.restrict(st, c, ~(1u << idx))) return std::nullopt;
                }
            }
        }
        if (!fill(st, rng, max_backtracks)) return std::nullopt;

        std::string cells(static_cast<std::size_t>(rows_) * cols_, '?');
        for (int c = 0; c < prop_.cells(); ++c) cells[c] = prop_.symbols()[std::countr_zero(st.domain[c])];
        for (auto [c, sym] : overlays) cells[c] = sym;
        return Level(rows_, cols_, std::move(cells), game_.game_id);
    }

private:
    static std::vector<char> terrain_symbols(const GameDef& game) {
        std::vector<char> out;
        for (char s : game.alphabet)
            if (!game.pattern_base.contains(s)) out.push_back(s);
        return out;
    }

    bool place_one(WindowPropagator::State& st, CounterRng& rng, int idx, std::vector<char>& taken) const {
        std::vector<int> legal;
        for (int c = 0; c < prop_.cells(); ++c)
            if (!taken[c] && (st.domain[c] >> idx & 1u)) legal.push_back(c);
        // a cell can still lead to a contradiction, so try a few before giving up
        for (int tries = 0; tries < 8 && !legal.empty(); ++tries) {
            const std::size_t pick = rng.below(legal.size());
            const int cell = legal[pick];
            WindowPropagator::State trial = st;
            if (prop_.assign(trial, cell, idx)) {
                st = std::move(trial);
                taken[cell] = 1;
                last_cell_ = cell;
                return true;
            }
            legal[pick] = legal.back();
            legal.pop_back();
        }
        return false;
    }

    bool fill(WindowPropagator::State& st, CounterRng& rng, int max_backtracks) const {
        struct Frame {
            WindowPropagator::State before;
            int cell;
            int symbol;
        };
        std::vector<Frame> stack;
        int backtracks = 0;
        std::vector<int> ties;
        std::vector<double> w;
        for (;;) {
            int best = 33;
            ties.clear();
            for (int c = 0; c < prop_.cells(); ++c) {
                const int n = std::popcount(st.domain[c]);
                if (n <= 1) continue;
                if (n < best) {
                    best = n;
                    ties.clear();
                }
                if (n == best) ties.push_back(c);
            }
            if (ties.empty()) return true;
            const int cell = ties[rng.below(ties.size())];
            std::vector<int> options;
            w.clear();
            for (std::uint32_t d = st.domain[cell]; d; d &= d - 1) {
                options.push_back(std::countr_zero(d));
                w.push_back(weights_[options.back()]);
            }
            const int symbol = options[rng.weighted(w)];
            stack.push_back({st, cell, symbol});
            if (prop_.assign(st, cell, symbol)) continue;
            // undo decisions until banning one of them leaves a consistent state
            for (;;) {
                if (stack.empty() || ++backtracks > max_backtracks) return false;
                Frame f = std::move(stack.back());
                stack.pop_back();
                st = std::move(f.before);
                if (prop_.restrict(st, f.cell, ~(1u << f.symbol))) break;
            }
        }
    }

    const GameDef& game_;
    int rows_;
    int cols_;
    WindowPropagator prop_;
    WindowPropagator::State start_;
    bool feasible_ = false;
    std::vector<double> weights_;
    mutable int last_cell_ = -1;
};

/// Pushes a solvable crates level into an unsolvable one by relocating a
/// single crate or slot, so tile counts stay exactly as they were. A crate
/// goes either onto a dead square (no slot reachable by pushing) or onto any
/// floor cell; a slot goes onto any floor cell. Candidates must be proven
/// unsolvable by a complete search and, when `patterns` is given, stay
/// acceptable.
inline std::optional<Level> mutate_crates_unsolvable(const Level& level, const GameDef& game, std::uint64_t seed,
                                                     const PatternSet* patterns = nullptr, int budget = 64,
                                                     SearchLimits limits = {}) {
    if (game.mechanics != Mechanics::Pusher) throw ConfigError("crate mutation needs a pusher game");
    const auto floor_sym = game.symbol_for(Role::Empty);
    const auto crate_sym = game.symbol_for(Role::Crate);
    const auto slot_sym = game.symbol_for(Role::Slot);
    if (!floor_sym || !crate_sym || !slot_sym) throw ConfigError(game.game_id + " lacks floor, crate or slot tiles");
    const char floor = *floor_sym, crate = *crate_sym, slot = *slot_sym;
    limits.want_witness = false;

    const CratesBoard board(level, game);
    const auto dist = detail::push_distance(board);
    std::vector<int> crates, slots, floors, dead;
    for (int i = 0; i < static_cast<int>(level.size()); ++i) {
        const char s = level.cells()[i];
        if (s == crate) crates.push_back(i);
        if (s == slot) slots.push_back(i);
        if (s == floor) {
            floors.push_back(i);
            if (dist[i] == detail::kUnreachable) dead.push_back(i);
        }
    }
    if (floors.empty()) return std::nullopt;
    CounterRng rng(seed);
    auto pick = [&](const std::vector<int>& v) { return level.pos(static_cast<std::size_t>(v[rng.below(v.size())])); };
    for (int attempt = 0; attempt < budget; ++attempt) {
        Level cand = level;
        switch (rng.below(3)) {
            case 0:
                if (crates.empty() || dead.empty()) continue;
                cand.set(pick(crates), floor);
                cand.set(pick(dead), crate);
                break;
            case 1:
                if (crates.empty()) continue;
                cand.set(pick(crates), floor);
                cand.set(pick(floors), crate);
                break;
            default:
                if (slots.empty()) continue;
                cand.set(pick(slots), floor);
                cand.set(pick(floors), slot);
                break;
        }
        if (cand == level) continue;
        if (patterns && !check_acceptable(cand, *patterns, game, false)) continue;
        if (check_solvable(cand, game, limits).status == Solvability::Unsolvable) return cand;
    }
    return std::nullopt;
}

/// Generates one level with the requested solvability label, retrying
/// constructions until `spec.retry_budget` attempts are used.
inline GenResult generate_level(const GameDef& game, const PatternSet& ps, const GenSpec& spec) {
    if (spec.retry_budget < 1) throw ConfigError("retry budget must be at least 1");
    if (spec.rows < 1 || spec.cols < 1) throw ConfigError("level dimensions must be positive");
    const double cells = static_cast<double>(spec.rows) * spec.cols;
    for (auto [sym, n] : spec.required_specials) {
        if (!game.contains(sym)) throw ConfigError(std::string("special '") + sym + "' not in alphabet");
        if (n < 0) throw ConfigError(std::string("negative count for special '") + sym + "'");
        auto it = ps.counts.find(sym);
        if (it == ps.counts.end()) continue;  // overlay markers carry no count range
        const double f = n / cells;
        if (f < it->second.first - 1e-12 || f > it->second.second + 1e-12)
            throw ConfigError(std::string("required count of '") + sym + "' falls outside the example range");
    }
    CandidateBuilder builder(game, ps, spec.rows, spec.cols);
    if (!builder.feasible())
        throw GenerationError("patterns cannot tile a " + std::to_string(spec.rows) + "x" + std::to_string(spec.cols) +
                                  " grid",
                              0);
    const CounterRng root(spec.seed);
    const bool mutate = spec.target == Label::Unsolvable && game.mechanics == Mechanics::Pusher;
    SearchLimits limits = spec.limits;
    limits.want_witness = spec.target == Label::Solvable && spec.limits.want_witness;

    for (int attempt = 1; attempt <= spec.retry_budget; ++attempt) {
        CounterRng rng = root.split(static_cast<std::uint64_t>(attempt));
        auto cand = builder.build(rng, spec.required_specials, spec.max_backtracks);
        if (!cand || !check_acceptable(*cand, ps, game, false)) continue;
        SolveResult res = check_solvable(*cand, game, limits);
        if (spec.target == Label::Solvable) {
            if (res.status == Solvability::Solvable) return {std::move(*cand), std::move(res.witness), attempt};
            continue;
        }
        if (!mutate) {
            if (res.status == Solvability::Unsolvable) return {std::move(*cand), std::nullopt, attempt};
            continue;
        }
        // crates rarely come out unsolvable by luck; start from a solvable
        // grid and break it locally instead
        if (res.status != Solvability::Solvable) continue;
        if (auto broken = mutate_crates_unsolvable(*cand, game, rng.next(), &ps, 64, spec.limits))
            return {std::move(*broken), std::nullopt, attempt};
    }
    throw GenerationError("retry budget of " + std::to_string(spec.retry_budget) + " attempts exhausted",
                          spec.retry_budget);
}

/// Generation spec pre-filled from a game variant's defaults.
inline GenSpec variant_spec(const GameDef& game, const std::string& variant, Label target, std::uint64_t seed) {
    GenSpec spec;
    spec.rows = game.default_rows;
    spec.cols = game.default_cols;
    spec.target = target;
    spec.seed = seed;
    spec.required_specials = game.variant(variant).specials;
    return spec;
}

}  // namespace tilerobust
