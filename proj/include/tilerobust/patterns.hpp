#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "game_def.hpp"
#include "level.hpp"

namespace tilerobust {

/// Acceptability model: the k x k windows seen in example levels plus the
/// observed range of each tile's share of the grid.
///
/// Windows are taken over the border-padded terrain view of a level: every
/// origin from (-(k-1), -(k-1)) to (rows-1, cols-1), with out-of-grid cells
/// holding `border` and overlay markers (start/goal) replaced by the tile
/// they stand on.
struct PatternSet {
    std::string game_id;
    int k = 3;
    char border = '~';
    double slack = 0.2;
    std::set<std::string> windows;                      // k*k chars, row-major
    std::map<char, std::pair<double, double>> counts;  // symbol -> [min, max] fraction

    friend bool operator==(const PatternSet&, const PatternSet&) = default;
};

inline std::vector<char> terrain_view(const Level& level, const GameDef& game) {
    std::vector<char> out(level.cells().begin(), level.cells().end());
    for (char& c : out) c = game.window_symbol(c);
    return out;
}

/// Window at origin (r0, c0) of a padded terrain view.
inline std::string window_at(const std::vector<char>& view, int rows, int cols, int r0, int c0, int k, char border) {
    std::string w(static_cast<std::size_t>(k) * k, border);
    for (int i = 0; i < k; ++i) {
        const int r = r0 + i;
        if (r < 0 || r >= rows) continue;
        for (int j = 0; j < k; ++j) {
            const int c = c0 + j;
            if (c < 0 || c >= cols) continue;
            w[static_cast<std::size_t>(i) * k + j] = view[static_cast<std::size_t>(r) * cols + c];
        }
    }
    return w;
}

inline std::map<char, double> tile_fractions(const Level& level, const GameDef& game) {
    std::map<char, double> f;
    for (char s : game.alphabet)
        if (!game.pattern_base.contains(s)) f[s] = 0.0;
    const auto view = terrain_view(level, game);
    for (char c : view) f[c] += 1.0;
    for (auto& [s, v] : f) v /= static_cast<double>(view.size());
    return f;
}

inline PatternSet extract_patterns(const std::vector<Level>& examples, const GameDef& game, int k, double slack = 0.2,
                                   char border = '~') {
    if (examples.empty()) throw Error("pattern extraction needs at least one example");
    if (k < 1) throw Error("window size must be >= 1");
    if (game.contains(border)) throw Error("border symbol collides with the alphabet");
    PatternSet ps;
    ps.game_id = game.game_id;
    ps.k = k;
    ps.border = border;
    ps.slack = slack;
    bool first = true;
    for (const Level& ex : examples) {
        if (ex.game_id() != game.game_id) throw Error("mixed games in pattern examples: " + ex.game_id());
        const auto view = terrain_view(ex, game);
        for (int r0 = -(k - 1); r0 < ex.rows(); ++r0)
            for (int c0 = -(k - 1); c0 < ex.cols(); ++c0)
                ps.windows.insert(window_at(view, ex.rows(), ex.cols(), r0, c0, k, border));
        for (auto [s, frac] : tile_fractions(ex, game)) {
            auto& range = ps.counts[s];
            if (first) range = {frac, frac};
            range.first = std::min(range.first, frac);
            range.second = std::max(range.second, frac);
        }
        first = false;
    }
    for (auto& [s, range] : ps.counts) {
        range.first = std::max(0.0, range.first * (1.0 - slack));
        range.second = std::min(1.0, range.second * (1.0 + slack));
    }
    return ps;
}

/// Extracts patterns from the example levels a game variant ships with.
inline PatternSet variant_patterns(const GameDef& game, const std::string& variant) {
    std::vector<Level> examples;
    for (const auto& path : game.variant(variant).examples) examples.push_back(read_level_file(path, game));
    return extract_patterns(examples, game, game.pattern_k, game.count_slack);
}

struct Violation {
    enum class Kind { Window, Count };
    Kind kind = Kind::Window;
    Pos origin;        // window origin (may be negative on the padded border)
    char symbol = 0;   // count violations
    double fraction = 0.0;
    friend bool operator==(const Violation&, const Violation&) = default;
};

struct Acceptability {
    bool acceptable = true;
    std::vector<Violation> violations;
    explicit operator bool() const { return acceptable; }
};

inline Acceptability check_acceptable(const Level& level, const PatternSet& ps, const GameDef& game,
                                      bool collect = true) {
    Acceptability out;
    const auto view = terrain_view(level, game);
    const int k = ps.k;
    for (int r0 = -(k - 1); r0 < level.rows(); ++r0) {
        for (int c0 = -(k - 1); c0 < level.cols(); ++c0) {
            if (ps.windows.contains(window_at(view, level.rows(), level.cols(), r0, c0, k, ps.border))) continue;
            out.acceptable = false;
            if (!collect) return out;
            out.violations.push_back({Violation::Kind::Window, {r0, c0}, 0, 0.0});
        }
    }
    for (auto [s, frac] : tile_fractions(level, game)) {
        auto it = ps.counts.find(s);
        const auto range = it == ps.counts.end() ? std::pair{0.0, 0.0} : it->second;
        // tolerance absorbs rounding in the slack multiplication
        constexpr double eps = 1e-12;
        if (frac < range.first - eps || frac > range.second + eps) {
            out.acceptable = false;
            if (!collect) return out;
            out.violations.push_back({Violation::Kind::Count, {-1, -1}, s, frac});
        }
    }
    return out;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

}  // namespace detail

/// Plain-text form: header lines, one `count` line per symbol, then one
/// window per line with rows separated by '/'.
inline std::string encode_patterns(const PatternSet& ps) {
    std::ostringstream out;
    out << "patternset 1\n";
    out << "game " << ps.game_id << '\n';
    out << "k " << ps.k << '\n';
    out << "border " << ps.border << '\n';
    out << "slack " << detail::format_double(ps.slack) << '\n';
    for (auto [s, range] : ps.counts)
        out << "count " << s << ' ' << detail::format_double(range.first) << ' ' << detail::format_double(range.second)
            << '\n';
    out << "windows " << ps.windows.size() << '\n';
    for (const auto& w : ps.windows) {
        for (int i = 0; i < ps.k; ++i) {
            if (i) out << '/';
            out << w.substr(static_cast<std::size_t>(i) * ps.k, ps.k);
        }
        out << '\n';
    }
    return out.str();
}

inline PatternSet decode_patterns(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    PatternSet ps;
    auto fail = [](const std::string& why) { return Error("pattern set: " + why); };
    if (!std::getline(in, line) || line != "patternset 1") throw fail("bad header");
    std::size_t expected = 0;
    bool in_windows = false;
    while (std::getline(in, line)) {
        if (in_windows) {
            std::string w;
            for (char c : line)
                if (c != '/') w.push_back(c);
            if (static_cast<int>(w.size()) != ps.k * ps.k) throw fail("window of wrong size: " + line);
            ps.windows.insert(w);
            continue;
        }
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "game") {
            ls >> ps.game_id;
        } else if (key == "k") {
            ls >> ps.k;
        } else if (key == "border") {
            ls >> ps.border;
        } else if (key == "slack") {
            ls >> ps.slack;
        } else if (key == "count") {
            // the symbol itself may be any printable char, so read it positionally
            if (line.size() < 8) throw fail("bad count line");
            const char s = line[6];
            std::istringstream rs(line.substr(8));
            double lo = 0, hi = 0;
            if (!(rs >> lo >> hi)) throw fail("bad count line: " + line);
            ps.counts[s] = {lo, hi};
        } else if (key == "windows") {
            ls >> expected;
            in_windows = true;
        } else if (!key.empty()) {
            throw fail("unknown key " + key);
        }
    }
    if (ps.windows.size() != expected) throw fail("window count mismatch");
    return ps;
}

inline void write_patterns(const std::filesystem::path& path, const PatternSet& ps) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << encode_patterns(ps);
}

inline PatternSet read_patterns(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_patterns(ss.str());
}

}  // namespace tilerobust
