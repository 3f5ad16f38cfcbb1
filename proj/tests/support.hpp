#pragma once

// Shared helpers for the unit and acceptance suites: catalog access, random
// instance builders and reference solvers written independently of the
// library's search code.

#include <tilerobust/game_def.hpp>
#include <tilerobust/level.hpp>
#include <tilerobust/rng.hpp>

#include <algorithm>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace testsupport {

namespace tr = tilerobust;

inline const tr::GameCatalog& catalog() {
    static const tr::GameCatalog cat = tr::GameCatalog::load(TILEROBUST_DEFAULT_GAMES_DIR);
    return cat;
}

inline const tr::GameDef& game(const std::string& id) { return catalog().get(id); }

/// Builds a level from rows of text without marker checks.
inline tr::Level grid(const std::string& game_id, const std::vector<std::string>& rows) {
    std::string cells;
    for (const auto& r : rows) cells += r;
    return tr::Level(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size()), cells,
                     game_id);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("tilerobust-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// ---------------------------------------------------------------------------
// crates reference: 0-1 BFS over single player steps. A walk costs 0 and a
// push costs 1, so the distance to the first solved state is the minimum
// number of pushes. No pruning of any kind.

inline std::optional<int> crates_min_pushes(const tr::Level& level) {
    const int rows = level.rows(), cols = level.cols(), n = rows * cols;
    std::vector<char> wall(n), slot(n);
    std::vector<int> crates;
    int player = -1;
    for (int i = 0; i < n; ++i) {
        const char c = level.cells()[i];
        wall[i] = c == 'X';
        slot[i] = c == 's' || c == 'C' || c == '+';
        if (c == 'c' || c == 'C') crates.push_back(i);
        if (c == '{' || c == '+') player = i;
    }
    if (player < 0) return std::nullopt;
    if (n > 511 || crates.size() > 6) throw std::invalid_argument("oracle handles up to 511 cells and 6 crates");
    // state key: 9-bit fields, player first, then the sorted crate cells (+1)
    auto pack = [](int p, const std::vector<int>& cs) {
        std::uint64_t key = static_cast<std::uint64_t>(p);
        for (std::size_t i = 0; i < cs.size(); ++i) key |= static_cast<std::uint64_t>(cs[i] + 1) << (9 * (i + 1));
        return key;
    };
    auto unpack = [&](std::uint64_t key, std::vector<int>& cs) {
        cs.clear();
        for (int i = 1; i <= 6; ++i) {
            const int v = static_cast<int>((key >> (9 * i)) & 0x1ff);
            if (v) cs.push_back(v - 1);
        }
        return static_cast<int>(key & 0x1ff);
    };
    auto solved = [&](const std::vector<int>& cs) {
        return std::all_of(cs.begin(), cs.end(), [&](int c) { return slot[c] != 0; });
    };
    std::sort(crates.begin(), crates.end());
    // distances live in a flat array when the (player, crates) space is small
    // enough, otherwise in a hash map
    std::uint64_t space = static_cast<std::uint64_t>(n);
    for (std::size_t i = 0; i < crates.size() && space <= (1ull << 26); ++i) space *= static_cast<std::uint64_t>(n);
    const bool dense = space <= (1ull << 26);
    std::vector<std::int32_t> flat(dense ? space : 0, -1);
    std::unordered_map<std::uint64_t, int> sparse;
    auto slot_of = [&](std::uint64_t key) {
        std::uint64_t idx = key & 0x1ff;
        for (std::size_t i = 1; i <= crates.size(); ++i) idx = idx * n + (((key >> (9 * i)) & 0x1ff) - 1);
        return idx;
    };
    auto get = [&](std::uint64_t key) {
        if (dense) return flat[slot_of(key)];
        auto it = sparse.find(key);
        return it == sparse.end() ? -1 : it->second;
    };
    auto put = [&](std::uint64_t key, int d) {
        if (dense)
            flat[slot_of(key)] = d;
        else
            sparse[key] = d;
    };
    std::deque<std::pair<std::uint64_t, int>> dq;
    const std::uint64_t s0 = pack(player, crates);
    put(s0, 0);
    dq.emplace_back(s0, 0);
    static constexpr int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
    std::vector<int> cs, next;
    while (!dq.empty()) {
        const auto [s, d] = dq.front();
        dq.pop_front();
        if (get(s) != d) continue;  // stale entry, a cheaper route was found
        const int at = unpack(s, cs);
        if (solved(cs)) return d;
        const int r = at / cols, c = at % cols;
        for (int k = 0; k < 4; ++k) {
            const int nr = r + dr[k], nc = c + dc[k];
            if (nr < 0 || nc < 0 || nr >= rows || nc >= cols) continue;
            const int t = nr * cols + nc;
            if (wall[t]) continue;
            next = cs;
            auto it = std::find(next.begin(), next.end(), t);
            int cost = 0;
            if (it != next.end()) {
                const int br = nr + dr[k], bc = nc + dc[k];
                if (br < 0 || bc < 0 || br >= rows || bc >= cols) continue;
                const int b = br * cols + bc;
                if (wall[b] || std::find(next.begin(), next.end(), b) != next.end()) continue;
                *it = b;
                std::sort(next.begin(), next.end());
                cost = 1;
            }
            const std::uint64_t key = pack(t, next);
            const int known = get(key);
            if (known >= 0 && known <= d + cost) continue;
            put(key, d + cost);
            if (cost == 0)
                dq.emplace_front(key, d);
            else
                dq.emplace_back(key, d + 1);
        }
    }
    return std::nullopt;
}

/// Random crates instance: rows/cols in [3, max_side], one player, up to
/// `max_crates` crates and as many slots (sometimes one spare).
inline tr::Level random_crates(tr::CounterRng& rng, int max_side = 6, int max_crates = 2) {
    const int rows = 3 + static_cast<int>(rng.below(max_side - 2));
    const int cols = 3 + static_cast<int>(rng.below(max_side - 2));
    std::string cells(static_cast<std::size_t>(rows) * cols, '-');
    for (char& c : cells)
        if (rng.uniform() < 0.25) c = 'X';
    std::vector<int> order(cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    rng.shuffle(order);
    const int n_crates = static_cast<int>(rng.below(max_crates + 1));
    const int n_slots = n_crates + (rng.uniform() < 0.2 ? 1 : 0);
    std::size_t at = 0;
    auto take = [&] { return order[at++ % order.size()]; };
    std::vector<int> slots, crates;
    for (int i = 0; i < n_slots; ++i) slots.push_back(take());
    for (int i = 0; i < n_crates; ++i) crates.push_back(rng.uniform() < 0.15 ? slots[i] : take());
    const int player = rng.uniform() < 0.1 && n_slots > n_crates ? slots.back() : take();
    for (int s : slots) cells[s] = 's';
    for (int c : crates) cells[c] = cells[c] == 's' ? 'C' : 'c';
    cells[player] = cells[player] == 's' ? '+' : '{';
    return tr::Level(rows, cols, cells, "crates");
}

// ---------------------------------------------------------------------------
// cave reference: least fixpoint of the reachability relation over
// (cell, holding key), computed by sweeping until nothing changes.

inline bool cave_reachable(const tr::Level& level) {
    const int rows = level.rows(), cols = level.cols(), n = rows * cols;
    const std::string& t = level.cells();
    std::vector<char> reach(static_cast<std::size_t>(n) * 2, 0);
    for (int i = 0; i < n; ++i)
        if (t[i] == '{') reach[i * 2] = 1;
    auto enter = [&](int cell, int key, bool& changed) {
        const char c = t[cell];
        if (c == 'X') return;
        if (c == 'D' && !key) return;
        const int k = key || c == 'K';
        if (!reach[cell * 2 + k]) {
            reach[cell * 2 + k] = 1;
            changed = true;
        }
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (int cell = 0; cell < n; ++cell) {
            for (int key = 0; key < 2; ++key) {
                if (!reach[cell * 2 + key]) continue;
                const int r = cell / cols, c = cell % cols;
                if (r > 0) enter(cell - cols, key, changed);
                if (r + 1 < rows) enter(cell + cols, key, changed);
                if (c > 0) enter(cell - 1, key, changed);
                if (c + 1 < cols) enter(cell + 1, key, changed);
                if (t[cell] == 'P' || t[cell] == 'Q') {
                    const char other = t[cell] == 'P' ? 'Q' : 'P';
                    for (int j = 0; j < n; ++j)
                        if (t[j] == other) enter(j, key, changed);
                }
            }
        }
    }
    for (int i = 0; i < n; ++i)
        if (t[i] == '}' && (reach[i * 2] || reach[i * 2 + 1])) return true;
    return false;
}

/// Random cave level up to max_side x max_side with one start and one goal.
/// `kind` 0 = simple, 1 = doors, 2 = portals.
inline tr::Level random_cave(tr::CounterRng& rng, int kind, int max_side = 8) {
    const int rows = 2 + static_cast<int>(rng.below(max_side - 1));
    const int cols = 2 + static_cast<int>(rng.below(max_side - 1));
    std::string cells(static_cast<std::size_t>(rows) * cols, '-');
    for (char& c : cells) {
        const double u = rng.uniform();
        if (u < 0.35) {
            c = 'X';
        } else if (kind == 1 && u < 0.42) {
            c = 'D';
        } else if (kind == 1 && u < 0.45) {
            c = 'K';
        } else if (kind == 2 && u < 0.40) {
            c = 'P';
        } else if (kind == 2 && u < 0.45) {
            c = 'Q';
        }
    }
    const std::size_t s = rng.below(cells.size());
    std::size_t g = rng.below(cells.size() - 1);
    if (g >= s) ++g;
    cells[s] = '{';
    cells[g] = '}';
    return tr::Level(rows, cols, cells, "cave");
}

}  // namespace testsupport
