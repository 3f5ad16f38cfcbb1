#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "game_def.hpp"
#include "level.hpp"
#include "search.hpp"
#include "witness.hpp"

namespace tilerobust {

/// Dynamic part of a crates level: player cell plus sorted crate cells.
struct CratesState {
    Pos player;
    std::vector<Pos> crates;

    void canonicalize() { std::sort(crates.begin(), crates.end()); }
    friend bool operator==(const CratesState&, const CratesState&) = default;
};

/// Static layout of a crates level (walls and slots) and the symbols used to
/// draw states back into levels.
class CratesBoard {
public:
    CratesBoard(const Level& level, const GameDef& game)
        : level_(level), rows_(level.rows()), cols_(level.cols()) {
        const std::size_t n = level.size();
        wall_.assign(n, 0);
        slot_.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const char sym = level.cells()[i];
            const Role role = game.role(game.functional(sym));
            wall_[i] = role == Role::Solid;
            slot_[i] = role == Role::Slot || role == Role::CrateOnSlot || role == Role::StartOnSlot;
            if (role == Role::Crate || role == Role::CrateOnSlot) crates_.push_back(static_cast<int>(i));
            if (role == Role::Start || role == Role::StartOnSlot) players_.push_back(static_cast<int>(i));
            if (slot_[i]) ++slot_count_;
        }
        floor_ = game.symbol_for(Role::Empty).value_or('-');
        slot_sym_ = game.symbol_for(Role::Slot).value_or('s');
        crate_ = game.symbol_for(Role::Crate).value_or('c');
        crate_on_slot_ = game.symbol_for(Role::CrateOnSlot).value_or('C');
        player_ = game.symbol_for(Role::Start).value_or('{');
        player_on_slot_ = game.symbol_for(Role::StartOnSlot).value_or('+');
    }

    [[nodiscard]] int rows() const { return rows_; }
    [[nodiscard]] int cols() const { return cols_; }
    [[nodiscard]] int cells() const { return rows_ * cols_; }
    [[nodiscard]] bool inside(int r, int c) const { return r >= 0 && c >= 0 && r < rows_ && c < cols_; }
    [[nodiscard]] bool wall(int cell) const { return wall_[cell] != 0; }
    [[nodiscard]] bool wall_at(int r, int c) const { return !inside(r, c) || wall_[r * cols_ + c]; }
    [[nodiscard]] bool slot(int cell) const { return slot_[cell] != 0; }
    [[nodiscard]] int slot_count() const { return slot_count_; }
    [[nodiscard]] const std::vector<int>& initial_crates() const { return crates_; }
    [[nodiscard]] const std::vector<int>& players() const { return players_; }
    [[nodiscard]] Pos pos(int cell) const { return {cell / cols_, cell % cols_}; }
    [[nodiscard]] int cell(Pos p) const { return p.row * cols_ + p.col; }

    /// Neighbour of `cell` in direction d (0 up, 1 down, 2 left, 3 right), -1 off-grid.
    [[nodiscard]] int step(int cell, int d) const {
        static constexpr int dr[4] = {-1, 1, 0, 0};
        static constexpr int dc[4] = {0, 0, -1, 1};
        const int r = cell / cols_ + dr[d];
        const int c = cell % cols_ + dc[d];
        return inside(r, c) ? r * cols_ + c : -1;
    }

    /// Draws a state over the static layout; other player tiles become floor/slot.
    [[nodiscard]] Level render(int player, const std::vector<int>& crates) const {
        std::string cells = level_.cells();
        for (int i = 0; i < cells_count(); ++i)
            if (!wall_[i]) cells[i] = slot_[i] ? slot_sym_ : floor_;
        for (int c : crates) cells[c] = slot_[c] ? crate_on_slot_ : crate_;
        cells[player] = slot_[player] ? player_on_slot_ : player_;
        return Level(rows_, cols_, std::move(cells), level_.game_id());
    }

private:
    [[nodiscard]] int cells_count() const { return rows_ * cols_; }

    const Level& level_;
    int rows_;
    int cols_;
    std::vector<std::uint8_t> wall_;
    std::vector<std::uint8_t> slot_;
    std::vector<int> crates_;
    std::vector<int> players_;
    int slot_count_ = 0;
    char floor_, slot_sym_, crate_, crate_on_slot_, player_, player_on_slot_;
};

namespace detail {

inline bool frozen_block(const CratesBoard& board, const std::vector<std::uint8_t>& occupied, int cell) {
    const int r0 = cell / board.cols();
    const int c0 = cell % board.cols();
    for (int dr = -1; dr <= 0; ++dr) {
        for (int dc = -1; dc <= 0; ++dc) {
            bool blocked = true;
            bool off_slot = false;
            for (int i = 0; i < 2 && blocked; ++i) {
                for (int j = 0; j < 2; ++j) {
                    const int r = r0 + dr + i;
                    const int c = c0 + dc + j;
                    if (board.wall_at(r, c)) continue;
                    const int idx = r * board.cols() + c;
                    if (!occupied[idx]) {
                        blocked = false;
                        break;
                    }
                    if (!board.slot(idx)) off_slot = true;
                }
            }
            if (blocked && off_slot) return true;
        }
    }
    return false;
}

inline bool corner(const CratesBoard& board, int cell) {
    const int r = cell / board.cols();
    const int c = cell % board.cols();
    const bool vertical = board.wall_at(r - 1, c) || board.wall_at(r + 1, c);
    const bool horizontal = board.wall_at(r, c - 1) || board.wall_at(r, c + 1);
    return vertical && horizontal;
}

}  // namespace detail

/// Sound (incomplete) deadlock test: an off-slot crate wedged in a corner,
/// or a 2x2 block of walls/crates holding at least one off-slot crate.
inline bool detect_deadlock(const Level& level, const GameDef& game, const CratesState& state) {
    CratesBoard board(level, game);
    std::vector<std::uint8_t> occupied(board.cells(), 0);
    for (Pos p : state.crates) occupied[board.cell(p)] = 1;
    for (Pos p : state.crates) {
        const int cell = board.cell(p);
        if (!board.slot(cell) && detail::corner(board, cell)) return true;
        if (detail::frozen_block(board, occupied, cell)) return true;
    }
    return false;
}

inline CratesState crates_state_of(const Level& level, const GameDef& game) {
    CratesBoard board(level, game);
    CratesState s;
    if (!board.players().empty()) s.player = board.pos(board.players().front());
    for (int c : board.initial_crates()) s.crates.push_back(board.pos(c));
    s.canonicalize();
    return s;
}

namespace detail {

/// Cells from which a lone crate can still be pushed onto some slot.
/// Pushes needed to bring a lone crate from each cell onto some slot, ignoring
/// other crates; kUnreachable marks dead squares.
inline constexpr int kUnreachable = 1 << 28;

inline std::vector<int> push_distance(const CratesBoard& board) {
    std::vector<int> dist(board.cells(), kUnreachable);
    std::deque<int> queue;
    for (int i = 0; i < board.cells(); ++i)
        if (board.slot(i) && !board.wall(i)) {
            dist[i] = 0;
            queue.push_back(i);
        }
    while (!queue.empty()) {
        const int y = queue.front();
        queue.pop_front();
        for (int d = 0; d < 4; ++d) {
            // crate at x = y - dir, pushed by a player standing at x - dir
            const int opposite = d ^ 1;
            const int x = board.step(y, opposite);
            if (x < 0 || board.wall(x) || dist[x] != kUnreachable) continue;
            const int stand = board.step(x, opposite);
            if (stand < 0 || board.wall(stand)) continue;
            dist[x] = dist[y] + 1;
            queue.push_back(x);
        }
    }
    return dist;
}

inline std::vector<std::uint8_t> live_cells(const CratesBoard& board) {
    const auto dist = push_distance(board);
    std::vector<std::uint8_t> live(board.cells(), 0);
    for (int i = 0; i < board.cells(); ++i) live[i] = dist[i] != kUnreachable;
    return live;
}

class CratesSearcher {
public:
    CratesSearcher(const CratesBoard& board, const SearchLimits& limits) : board_(board), limits_(limits) {
        dist_ = push_distance(board);
        if (limits.deadlock_pruning) {
            live_.resize(board.cells());
            for (int i = 0; i < board.cells(); ++i) live_[i] = dist_[i] != kUnreachable;
        }
        occupied_.assign(board.cells(), 0);
        mark_.assign(board.cells(), 0);
        for (int i = 0; i < board.cells(); ++i)
            if (board.slot(i)) slots_.push_back(i);
    }

    SolveResult run(int player, std::vector<int> crates) {
        SolveResult result;
        std::sort(crates.begin(), crates.end());
        k_ = crates.size();
        pool_.clear();
        nodes_.clear();
        add_node(crates, player, -1, -1, -1, 0);
        SearchBudget budget(limits_);
        // children are deduplicated on their exact player cell; the region
        // normalized key is only known once a node is expanded
        std::unordered_set<int, KeyHash<false>, KeyEq<false>> seen(1024, KeyHash<false>{this}, KeyEq<false>{this});
        std::unordered_set<int, KeyHash<true>, KeyEq<true>> closed(1024, KeyHash<true>{this}, KeyEq<true>{this});
        seen.insert(0);
        int goal = solved(0) ? 0 : -1;

        struct Entry {
            int f, g;
            std::uint64_t seq;
            int id;
            bool operator<(const Entry& o) const {
                if (f != o.f) return f > o.f;
                if (g != o.g) return g < o.g;
                return seq > o.seq;
            }
        };
        const bool bfs = limits_.crates_search == CratesSearch::BreadthFirst;
        std::deque<int> fifo;
        std::priority_queue<Entry> heap;
        std::uint64_t seq = 0;
        if (bfs)
            fifo.push_back(0);
        else
            heap.push({heuristic(0), 0, seq++, 0});

        std::vector<int> next(k_);
        while (goal < 0) {
            int id;
            if (bfs) {
                if (fifo.empty()) break;
                id = fifo.front();
                fifo.pop_front();
            } else {
                if (heap.empty()) break;
                id = heap.top().id;
                heap.pop();
                if (solved(id)) {
                    goal = id;
                    break;
                }
            }
            const std::vector<int> cur(crates_of(id), crates_of(id) + k_);
            for (int c : cur) occupied_[c] = 1;
            nodes_[id].region = flood(nodes_[id].player);
            if (!closed.insert(id).second) {
                for (int c : cur) occupied_[c] = 0;
                continue;
            }
            if (!budget.spend()) {
                result.status = Solvability::LimitExceeded;
                result.expanded = budget.expanded();
                for (int c : cur) occupied_[c] = 0;
                return result;
            }
            const int g = nodes_[id].g;
            for (std::size_t i = 0; i < k_ && goal < 0; ++i) {
                for (int d = 0; d < 4; ++d) {
                    const int from = board_.step(cur[i], d ^ 1);
                    const int to = board_.step(cur[i], d);
                    if (from < 0 || to < 0 || mark_[from] != stamp_ || board_.wall(to) || occupied_[to]) continue;
                    if (!live_.empty() && !live_[to]) continue;
                    next = cur;
                    next[i] = to;
                    if (!live_.empty()) {
                        occupied_[cur[i]] = 0;
                        occupied_[to] = 1;
                        const bool frozen = frozen_block(board_, occupied_, to);
                        occupied_[to] = 0;
                        occupied_[cur[i]] = 1;
                        if (frozen) continue;
                    }
                    std::sort(next.begin(), next.end());
                    const int child = add_node(next, cur[i], id, from, cur[i], g + 1);
                    if (!seen.insert(child).second) {
                        drop_last();
                        continue;
                    }
                    if (bfs) {
                        if (solved(child)) {
                            goal = child;
                            break;
                        }
                        fifo.push_back(child);
                    } else {
                        heap.push({g + 1 + 3 * heuristic(child), g + 1, seq++, child});
                    }
                }
            }
            for (int c : cur) occupied_[c] = 0;
        }
        result.expanded = budget.expanded();
        if (goal < 0) {
            result.status = Solvability::Unsolvable;
            return result;
        }
        result.status = Solvability::Solvable;
        result.pushes = static_cast<std::size_t>(nodes_[goal].g);
        if (limits_.want_witness) result.witness = SolutionWitness::playthrough(playthrough(goal, player));
        return result;
    }

private:
    struct Node {
        int player;  // cell the player stands on
        int parent;
        int push_from;
        int crate_from;
        int g;
        int region = -1;  // smallest cell of the player's region, set on expansion
        [[nodiscard]] int key(bool by_region) const { return by_region ? region : player; }
    };

    template <bool ByRegion>
    struct KeyHash {
        const CratesSearcher* s;
        std::size_t operator()(int id) const {
            std::uint64_t h = 1469598103934665603ULL ^ static_cast<std::uint64_t>(s->nodes_[id].key(ByRegion));
            const int* c = s->crates_of(id);
            for (std::size_t i = 0; i < s->k_; ++i) h = (h ^ static_cast<std::uint64_t>(c[i])) * 1099511628211ULL;
            return static_cast<std::size_t>(h);
        }
    };
    template <bool ByRegion>
    struct KeyEq {
        const CratesSearcher* s;
        bool operator()(int a, int b) const {
            if (s->nodes_[a].key(ByRegion) != s->nodes_[b].key(ByRegion)) return false;
            return std::equal(s->crates_of(a), s->crates_of(a) + s->k_, s->crates_of(b));
        }
    };

    [[nodiscard]] const int* crates_of(int id) const { return pool_.data() + static_cast<std::size_t>(id) * k_; }

    int add_node(const std::vector<int>& crates, int player, int parent, int push_from, int crate_from, int g) {
        pool_.insert(pool_.end(), crates.begin(), crates.end());
        nodes_.push_back({player, parent, push_from, crate_from, g, -1});
        return static_cast<int>(nodes_.size() - 1);
    }

    void drop_last() {
        nodes_.pop_back();
        pool_.resize(pool_.size() - k_);
    }

    [[nodiscard]] bool solved(int id) const {
        const int* c = crates_of(id);
        for (std::size_t i = 0; i < k_; ++i)
            if (!board_.slot(c[i])) return false;
        return true;
    }

    [[nodiscard]] int heuristic(int id) const {
        int h = 0;
        const int* c = crates_of(id);
        for (std::size_t i = 0; i < k_; ++i) h += std::min(dist_[c[i]], 1 << 16);
        return h;
    }

    /// Stamps the player's region into mark_ and returns its smallest cell
    /// (occupied_ must hold the crates).
    int flood(int start) {
        auto& mark = mark_;
        const std::uint32_t stamp = ++stamp_;
        int lowest = start;
        queue_.clear();
        queue_.push_back(start);
        mark[start] = stamp;
        for (std::size_t head = 0; head < queue_.size(); ++head) {
            const int cell = queue_[head];
            lowest = std::min(lowest, cell);
            for (int d = 0; d < 4; ++d) {
                const int n = board_.step(cell, d);
                if (n < 0 || mark[n] == stamp || board_.wall(n) || occupied_[n]) continue;
                mark[n] = stamp;
                queue_.push_back(n);
            }
        }
        return lowest;
    }

    /// Shortest walk between two cells avoiding crates (both inclusive).
    std::vector<int> walk(int from, int to, const std::vector<int>& crates) {
        for (int c : crates) occupied_[c] = 1;
        std::vector<int> parent(board_.cells(), -1);
        std::deque<int> q{from};
        parent[from] = from;
        while (!q.empty() && parent[to] < 0) {
            const int cell = q.front();
            q.pop_front();
            for (int d = 0; d < 4; ++d) {
                const int n = board_.step(cell, d);
                if (n < 0 || parent[n] >= 0 || board_.wall(n) || occupied_[n]) continue;
                parent[n] = cell;
                q.push_back(n);
            }
        }
        for (int c : crates) occupied_[c] = 0;
        std::vector<int> path;
        if (parent[to] < 0) return path;
        for (int c = to; c != from; c = parent[c]) path.push_back(c);
        path.push_back(from);
        std::reverse(path.begin(), path.end());
        return path;
    }

    std::vector<Level> playthrough(int goal, int player) {
        std::vector<int> chain;
        for (int id = goal; id >= 0; id = nodes_[id].parent) chain.push_back(id);
        std::reverse(chain.begin(), chain.end());
        std::vector<Level> states;
        std::vector<int> crates(crates_of(chain.front()), crates_of(chain.front()) + k_);
        states.push_back(board_.render(player, crates));
        for (std::size_t i = 1; i < chain.size(); ++i) {
            const Node& n = nodes_[chain[i]];
            const auto path = walk(player, n.push_from, crates);
            for (std::size_t j = 1; j < path.size(); ++j) states.push_back(board_.render(path[j], crates));
            const int dir_to = n.crate_from + (n.crate_from - n.push_from);
            std::replace(crates.begin(), crates.end(), n.crate_from, dir_to);
            player = n.crate_from;
            states.push_back(board_.render(player, crates));
        }
        return states;
    }

    const CratesBoard& board_;
    const SearchLimits& limits_;
    std::vector<int> dist_;
    std::vector<std::uint8_t> live_;
    std::vector<std::uint8_t> occupied_;
    std::vector<std::uint32_t> mark_;
    std::uint32_t stamp_ = 0;
    std::vector<int> queue_;
    std::vector<int> slots_;
    std::vector<int> pool_;
    std::vector<Node> nodes_;
    std::size_t k_ = 0;
};

}  // namespace detail

/// Push search over (player region, crate set) states. Best-first by default;
/// breadth-first mode returns a push-optimal playthrough.
inline SolveResult solve_crates(const Level& level, const GameDef& game, const SearchLimits& limits) {
    CratesBoard board(level, game);
    SolveResult result;
    if (board.players().empty()) {
        result.note = "no player";
        return result;
    }
    if (static_cast<int>(board.initial_crates().size()) > board.slot_count()) {
        result.note = "more crates than slots";
        return result;
    }
    SearchLimits effective = limits;
    if (board.players().size() > 1) effective.want_witness = false;
    detail::CratesSearcher searcher(board, effective);
    bool limited = false;
    for (int player : board.players()) {
        SolveResult r = searcher.run(player, board.initial_crates());
        result.expanded += r.expanded;
        if (r.solvable()) {
            r.expanded = result.expanded;
            return r;
        }
        limited |= r.status == Solvability::LimitExceeded;
    }
    result.status = limited ? Solvability::LimitExceeded : Solvability::Unsolvable;
    return result;
}

/// Every level reachable from `state` by one walk or one push.
inline std::vector<Level> crates_moves(const Level& state, const GameDef& game) {
    std::vector<Level> out;
    CratesBoard board(state, game);
    if (board.players().size() != 1) return out;
    const int player = board.players().front();
    std::vector<int> crates = board.initial_crates();
    auto has_crate = [&](int cell) { return std::find(crates.begin(), crates.end(), cell) != crates.end(); };
    for (int d = 0; d < 4; ++d) {
        const int to = board.step(player, d);
        if (to < 0 || board.wall(to)) continue;
        if (!has_crate(to)) {
            out.push_back(board.render(to, crates));
            continue;
        }
        const int beyond = board.step(to, d);
        if (beyond < 0 || board.wall(beyond) || has_crate(beyond)) continue;
        std::vector<int> moved = crates;
        std::replace(moved.begin(), moved.end(), to, beyond);
        out.push_back(board.render(to, moved));
    }
    return out;
}

inline VerifyResult verify_playthrough(const Level& level, const std::vector<Level>& states, const GameDef& game) {
    if (states.empty()) return {VerifyCode::Empty, 0};
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i].rows() != level.rows() || states[i].cols() != level.cols()) return {VerifyCode::ShapeMismatch, i};
    if (states.front().cells() != level.cells()) return {VerifyCode::BadStart, 0};
    for (std::size_t i = 1; i < states.size(); ++i) {
        const auto moves = crates_moves(states[i - 1], game);
        const bool legal = std::any_of(moves.begin(), moves.end(),
                                       [&](const Level& m) { return m.cells() == states[i].cells(); });
        if (!legal) return {VerifyCode::IllegalMove, i};
    }
    if (count_role(states.back(), game, Role::Crate) != 0) return {VerifyCode::GoalNotReached, states.size()};
    return {};
}

}  // namespace tilerobust
