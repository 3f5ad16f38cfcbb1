#pragma once

#include <bit>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "game_def.hpp"
#include "level.hpp"
#include "search.hpp"
#include "witness.hpp"

namespace tilerobust {

/// Player state for the path-based games (cave, platform, vertical).
///
/// `keys` is a has-key flag when keys are not consumed, otherwise a bitmask
/// of collected key tiles; `opened` is the bitmask of doors already unlocked
/// in consuming mode. Platform and vertical only use the position: every
/// stored state is a resting pose, arcs and falls are resolved inside a move.
struct PlayerState {
    int cell = 0;
    std::uint32_t keys = 0;
    std::uint32_t opened = 0;
    friend bool operator==(const PlayerState&, const PlayerState&) = default;
};

struct PlayerStateHash {
    std::size_t operator()(const PlayerState& s) const {
        std::uint64_t h = static_cast<std::uint64_t>(s.cell) * 0x9e3779b97f4a7c15ULL;
        h ^= (static_cast<std::uint64_t>(s.keys) << 32 | s.opened) + 0x7f4a7c159e3779b9ULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

struct Step {
    PlayerState next;
    bool teleport = false;  // portal hop, not an edge of the witness
};

/// Reachability template: legal moves from a player state on one level.
class MovementTemplate {
public:
    MovementTemplate(const Level& level, const GameDef& game)
        : rows_(level.rows()), cols_(level.cols()), mechanics_(game.mechanics), params_(game.movement) {
        const std::size_t n = level.size();
        role_.resize(n);
        key_index_.assign(n, -1);
        door_index_.assign(n, -1);
        int keys = 0;
        int doors = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const char sym = level.cells()[i];
            role_[i] = game.role(game.functional(sym));
            if (role_[i] == Role::Key) key_index_[i] = keys++;
            if (role_[i] == Role::Door) door_index_[i] = doors++;
            if (role_[i] == Role::Start || role_[i] == Role::StartOnSlot) starts_.push_back(static_cast<int>(i));
        }
        if (params_.consume_keys && (keys > 32 || doors > 32)) supported_ = false;
        // Portal hops go from a tile to every tile of its partner symbol.
        partners_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (role_[i] != Role::Portal) continue;
            const auto partner = game.portal_partner(level.cells()[i]);
            if (!partner) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i && level.cells()[j] == *partner) partners_[i].push_back(static_cast<int>(j));
        }
    }

    [[nodiscard]] bool supported() const { return supported_; }
    [[nodiscard]] int cols() const { return cols_; }
    [[nodiscard]] Pos pos(int cell) const { return {cell / cols_, cell % cols_}; }
    [[nodiscard]] int cell(Pos p) const { return p.row * cols_ + p.col; }

    [[nodiscard]] std::vector<PlayerState> starts() const {
        std::vector<PlayerState> out;
        for (int s : starts_) out.push_back({s, 0, 0});
        return out;
    }

    [[nodiscard]] bool is_goal(const PlayerState& s) const { return role_[s.cell] == Role::Goal; }

    void successors(const PlayerState& s, std::vector<Step>& out) const {
        out.clear();
        switch (mechanics_) {
            case Mechanics::GridWalk: walk_moves(s, out); break;
            case Mechanics::Platformer: platform_moves(s, out); break;
            case Mechanics::Climber: climber_moves(s, out); break;
            case Mechanics::Pusher: break;
        }
    }

private:
    [[nodiscard]] bool inside(int r, int c) const { return r >= 0 && c >= 0 && r < rows_ && c < cols_; }
    [[nodiscard]] bool solid(int r, int c) const { return inside(r, c) && role_[r * cols_ + c] == Role::Solid; }
    [[nodiscard]] bool open(int r, int c) const { return inside(r, c) && role_[r * cols_ + c] != Role::Solid; }
    [[nodiscard]] bool goal(int r, int c) const { return role_[r * cols_ + c] == Role::Goal; }
    [[nodiscard]] bool supported(int r, int c) const { return solid(r + 1, c); }
    [[nodiscard]] bool clinging(int r, int c) const { return solid(r, c - 1) || solid(r, c + 1); }
    [[nodiscard]] bool resting(int r, int c) const {
        return mechanics_ == Mechanics::Climber ? supported(r, c) || clinging(r, c) : supported(r, c);
    }

    void walk_moves(const PlayerState& s, std::vector<Step>& out) const {
        const int r = s.cell / cols_;
        const int c = s.cell % cols_;
        static constexpr int dr[4] = {-1, 1, 0, 0};
        static constexpr int dc[4] = {0, 0, -1, 1};
        for (int d = 0; d < 4; ++d) {
            const int nr = r + dr[d];
            const int nc = c + dc[d];
            if (!open(nr, nc)) continue;
            const int target = nr * cols_ + nc;
            PlayerState next{target, s.keys, s.opened};
            if (role_[target] == Role::Door) {
                if (!params_.consume_keys) {
                    if (!s.keys) continue;
                } else {
                    const std::uint32_t bit = 1u << door_index_[target];
                    if (!(s.opened & bit)) {
                        const int held = std::popcount(s.keys) - std::popcount(s.opened);
                        if (held < 1) continue;
                        next.opened |= bit;
                    }
                }
            } else if (role_[target] == Role::Key) {
                next.keys |= params_.consume_keys ? (1u << key_index_[target]) : 1u;
            }
            out.push_back({next, false});
        }
        for (int p : partners_[s.cell]) out.push_back({{p, s.keys, s.opened}, true});
    }

    /// Follows `path` cell by cell, then falls until resting. Touching the
    /// goal anywhere along the way ends the move on the goal.
    [[nodiscard]] std::optional<int> trace(std::initializer_list<Pos> path) const {
        return trace_span(path.begin(), path.end());
    }

    template <class It>
    [[nodiscard]] std::optional<int> trace_span(It first, It last) const {
        int r = 0;
        int c = 0;
        for (auto it = first; it != last; ++it) {
            r = it->row;
            c = it->col;
            if (!open(r, c)) return std::nullopt;
            if (goal(r, c)) return r * cols_ + c;
        }
        return fall(r, c);
    }

    [[nodiscard]] std::optional<int> fall(int r, int c) const {
        while (!resting(r, c)) {
            ++r;
            if (!inside(r, c)) return std::nullopt;
            if (goal(r, c)) return r * cols_ + c;
        }
        return r * cols_ + c;
    }

    static void add_unique(std::vector<Step>& out, int from, std::optional<int> to) {
        if (!to || *to == from) return;
        for (const Step& s : out)
            if (s.next.cell == *to) return;
        out.push_back({{*to, 0, 0}, false});
    }

    void platform_moves(const PlayerState& s, std::vector<Step>& out) const {
        const int r = s.cell / cols_;
        const int c = s.cell % cols_;
        if (!resting(r, c)) {
            add_unique(out, s.cell, fall(r, c));
            return;
        }
        for (int d : {-1, 1}) add_unique(out, s.cell, trace({{r, c + d}}));
        std::vector<Pos> arc;
        for (int h = 1; h <= params_.jump_height; ++h) {
            for (int d : {-1, 1}) {
                for (int w = 0; w <= params_.jump_width; ++w) {
                    if (w == 0 && d == 1) continue;
                    arc.clear();
                    for (int i = 1; i <= h; ++i) arc.push_back({r - i, c});
                    for (int j = 1; j <= w; ++j) arc.push_back({r - h, c + d * j});
                    add_unique(out, s.cell, trace_span(arc.begin(), arc.end()));
                }
            }
        }
    }

    void climber_moves(const PlayerState& s, std::vector<Step>& out) const {
        const int r = s.cell / cols_;
        const int c = s.cell % cols_;
        if (!resting(r, c)) {
            add_unique(out, s.cell, fall(r, c));
            return;
        }
        std::vector<Pos> path;
        if (supported(r, c)) {
            for (int d : {-1, 1}) {
                add_unique(out, s.cell, trace({{r, c + d}}));
                // ledge leap: only where the next cell drops away
                if (open(r, c + d) && !supported(r, c + d)) {
                    path.clear();
                    for (int i = 1; i <= params_.leap_length; ++i) path.push_back({r, c + d * i});
                    add_unique(out, s.cell, trace_span(path.begin(), path.end()));
                }
            }
        }
        for (int side : {-1, 1}) {
            if (!solid(r, c + side)) continue;
            // climb one up; mantle onto the wall top when the wall ends
            if (open(r - 1, c)) {
                if (goal(r - 1, c) || resting(r - 1, c))
                    add_unique(out, s.cell, (r - 1) * cols_ + c);
                else
                    add_unique(out, s.cell, trace({{r - 1, c}, {r - 1, c + side}}));
            }
            for (int len = 1; len <= params_.wall_jump_length; ++len) {
                path.clear();
                for (int i = 1; i <= len; ++i) path.push_back({r - i, c - side * i});
                add_unique(out, s.cell, trace_span(path.begin(), path.end()));
            }
        }
    }

    int rows_;
    int cols_;
    Mechanics mechanics_;
    MovementParams params_;
    std::vector<Role> role_;
    std::vector<int> key_index_;
    std::vector<int> door_index_;
    std::vector<int> starts_;
    std::vector<std::vector<int>> partners_;
    bool supported_ = true;
};

/// Breadth-first search from every start tile; shortest edge path on success.
inline SolveResult solve_walker(const Level& level, const GameDef& game, const SearchLimits& limits) {
    SolveResult result;
    MovementTemplate moves(level, game);
    if (!moves.supported()) {
        result.status = Solvability::LimitExceeded;
        result.note = "too many keys or doors for consuming mode";
        return result;
    }
    struct Node {
        PlayerState state;
        int parent;
        bool teleport;
    };
    std::vector<Node> nodes;
    std::unordered_map<PlayerState, int, PlayerStateHash> seen;
    std::deque<int> frontier;
    for (const PlayerState& s : moves.starts()) {
        if (seen.emplace(s, static_cast<int>(nodes.size())).second) {
            frontier.push_back(static_cast<int>(nodes.size()));
            nodes.push_back({s, -1, false});
        }
    }
    if (nodes.empty()) {
        result.note = "no start tile";
        return result;
    }
    SearchBudget budget(limits);
    std::vector<Step> steps;
    int goal_node = -1;
    for (int id : frontier)
        if (moves.is_goal(nodes[id].state)) goal_node = id;
    while (goal_node < 0 && !frontier.empty()) {
        const int id = frontier.front();
        frontier.pop_front();
        if (!budget.spend()) {
            result.status = Solvability::LimitExceeded;
            result.expanded = budget.expanded();
            return result;
        }
        const PlayerState cur = nodes[id].state;
        moves.successors(cur, steps);
        for (const Step& st : steps) {
            auto [it, fresh] = seen.emplace(st.next, static_cast<int>(nodes.size()));
            if (!fresh) continue;
            nodes.push_back({st.next, id, st.teleport});
            if (moves.is_goal(st.next)) {
                goal_node = it->second;
                break;
            }
            frontier.push_back(it->second);
        }
    }
    result.expanded = budget.expanded();
    if (goal_node < 0) {
        result.status = Solvability::Unsolvable;
        return result;
    }
    result.status = Solvability::Solvable;
    if (limits.want_witness) {
        std::vector<Edge> edges;
        for (int id = goal_node; nodes[id].parent >= 0; id = nodes[id].parent) {
            if (nodes[id].teleport) continue;
            edges.push_back({moves.pos(nodes[nodes[id].parent].state.cell), moves.pos(nodes[id].state.cell)});
        }
        std::reverse(edges.begin(), edges.end());
        result.witness = SolutionWitness::path(std::move(edges));
    }
    return result;
}

/// Replays an edge path. Consecutive edges must share endpoints unless the
/// gap is a portal hop between partner tiles.
inline VerifyResult verify_edge_path(const Level& level, const std::vector<Edge>& edges, const GameDef& game) {
    if (edges.empty()) return {VerifyCode::Empty, 0};
    MovementTemplate moves(level, game);
    auto in_level = [&](Pos p) { return level.in_bounds(p); };
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (!in_level(edges[i].from) || !in_level(edges[i].to)) return {VerifyCode::IllegalMove, i};
    const int first = moves.cell(edges.front().from);
    const Role start_role = game.role(game.functional(level.cells()[first]));
    if (start_role != Role::Start && start_role != Role::StartOnSlot) return {VerifyCode::BadStart, 0};
    PlayerState cur{first, 0, 0};
    std::vector<Step> steps;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const int from = moves.cell(edges[i].from);
        if (from != cur.cell) {
            // a gap is fine if a chain of portal hops bridges it
            std::vector<PlayerState> hops{cur};
            std::unordered_set<int> visited{cur.cell};
            bool hopped = false;
            for (std::size_t h = 0; h < hops.size() && !hopped; ++h) {
                moves.successors(hops[h], steps);
                for (const Step& st : steps) {
                    if (!st.teleport || !visited.insert(st.next.cell).second) continue;
                    if (st.next.cell == from) {
                        cur = st.next;
                        hopped = true;
                        break;
                    }
                    hops.push_back(st.next);
                }
            }
            if (!hopped) return {VerifyCode::Discontinuity, i};
        }
        moves.successors(cur, steps);
        const int to = moves.cell(edges[i].to);
        bool moved = false;
        for (const Step& st : steps) {
            if (!st.teleport && st.next.cell == to) {
                cur = st.next;
                moved = true;
                break;
            }
        }
        if (!moved) return {VerifyCode::IllegalMove, i};
    }
    if (!moves.is_goal(cur)) return {VerifyCode::GoalNotReached, edges.size()};
    return {};
}

}  // namespace tilerobust
