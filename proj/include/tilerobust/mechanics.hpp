#pragma once

#include "crates.hpp"
#include "game_def.hpp"
#include "level.hpp"
#include "search.hpp"
#include "walkers.hpp"
#include "witness.hpp"

namespace tilerobust {

/// Decides whether the goal condition is reachable and, when it is, returns a
/// witness that verify_witness accepts.
///
/// Grids that break the marker invariant (as radius-1 perturbations can) are
/// still decided: solvable iff some start tile reaches some goal. A grid with
/// no start, or with no goal in a goal-based game, is unsolvable.
inline SolveResult check_solvable(const Level& level, const GameDef& game, const SearchLimits& limits = {}) {
    for (char c : level.cells())
        if (!game.contains(c)) throw Error(std::string("symbol '") + c + "' not in alphabet of " + game.game_id);
    if (game.mechanics == Mechanics::Pusher) return solve_crates(level, game, limits);
    return solve_walker(level, game, limits);
}

inline VerifyResult verify_witness(const Level& level, const SolutionWitness& witness, const GameDef& game) {
    const bool wants_playthrough = game.mechanics == Mechanics::Pusher;
    if (wants_playthrough != (witness.kind == SolutionWitness::Kind::Playthrough)) return {VerifyCode::KindMismatch, 0};
    if (wants_playthrough) return verify_playthrough(level, witness.states, game);
    return verify_edge_path(level, witness.edges, game);
}

}  // namespace tilerobust
