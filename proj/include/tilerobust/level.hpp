#pragma once

#include <compare>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "game_def.hpp"
#include "rng.hpp"

namespace tilerobust {

struct Pos {
    int row = 0;
    int col = 0;
    friend auto operator<=>(const Pos&, const Pos&) = default;
};

/// Rectangular tile grid tagged with the game it belongs to.
///
/// Cells are stored row-major, one character per tile. A Level only
/// guarantees rectangular shape; alphabet and marker-count checks belong to
/// parse_level / validate_markers so that perturbed grids (which may carry two
/// starts or none) remain representable.
class Level {
public:
    Level() = default;
    Level(int rows, int cols, std::string cells, std::string game_id)
        : rows_(rows), cols_(cols), cells_(std::move(cells)), game_id_(std::move(game_id)) {
        if (rows_ < 0 || cols_ < 0 || cells_.size() != static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_))
            throw Error("level cell count does not match dimensions");
    }

    [[nodiscard]] int rows() const { return rows_; }
    [[nodiscard]] int cols() const { return cols_; }
    [[nodiscard]] std::size_t size() const { return cells_.size(); }
    [[nodiscard]] const std::string& cells() const { return cells_; }
    [[nodiscard]] const std::string& game_id() const { return game_id_; }

    [[nodiscard]] bool in_bounds(Pos p) const { return p.row >= 0 && p.col >= 0 && p.row < rows_ && p.col < cols_; }
    [[nodiscard]] std::size_t index(Pos p) const { return static_cast<std::size_t>(p.row) * cols_ + p.col; }
    [[nodiscard]] Pos pos(std::size_t index) const {
        return {static_cast<int>(index / cols_), static_cast<int>(index % cols_)};
    }

    [[nodiscard]] char at(Pos p) const { return cells_[index(p)]; }
    [[nodiscard]] char at(int row, int col) const { return at(Pos{row, col}); }

    [[nodiscard]] Level with(Pos p, char symbol) const {
        Level out = *this;
        out.cells_[index(p)] = symbol;
        return out;
    }
    void set(Pos p, char symbol) { cells_[index(p)] = symbol; }

    [[nodiscard]] std::vector<Pos> find_all(char symbol) const {
        std::vector<Pos> out;
        for (std::size_t i = 0; i < cells_.size(); ++i)
            if (cells_[i] == symbol) out.push_back(pos(i));
        return out;
    }

    [[nodiscard]] std::size_t count(char symbol) const {
        std::size_t n = 0;
        for (char c : cells_) n += (c == symbol);
        return n;
    }

    friend bool operator==(const Level&, const Level&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::string cells_;
    std::string game_id_;
};

enum class LevelErrorKind { RaggedRows, UnknownSymbol, StartCount, GoalCount, Empty };

class LevelError : public Error {
public:
    LevelError(LevelErrorKind kind, std::string message, int row = -1, int col = -1)
        : Error(std::move(message)), kind_(kind), row_(row), col_(col) {}
    [[nodiscard]] LevelErrorKind kind() const { return kind_; }
    [[nodiscard]] int row() const { return row_; }
    [[nodiscard]] int col() const { return col_; }

private:
    LevelErrorKind kind_;
    int row_;
    int col_;
};

inline std::size_t count_role(const Level& level, const GameDef& game, Role role) {
    std::size_t n = 0;
    for (char c : level.cells())
        if (game.contains(c) && game.role(c) == role) ++n;
    return n;
}

/// Checks the marker counts a well-formed level must have: one player
/// (`{` or a player-on-slot tile), and one goal when the game has goals.
inline std::optional<LevelError> marker_violation(const Level& level, const GameDef& game) {
    const auto starts = count_role(level, game, Role::Start) + count_role(level, game, Role::StartOnSlot);
    if (starts != 1)
        return LevelError(LevelErrorKind::StartCount, "expected exactly one start tile, found " + std::to_string(starts));
    const auto goals = count_role(level, game, Role::Goal);
    const std::size_t want = game.has_role(Role::Goal) ? 1 : 0;
    if (goals != want)
        return LevelError(LevelErrorKind::GoalCount,
                          "expected " + std::to_string(want) + " goal tile(s), found " + std::to_string(goals));
    return std::nullopt;
}

inline void validate_markers(const Level& level, const GameDef& game) {
    if (auto err = marker_violation(level, game)) throw *err;
}

/// Parses newline-separated rows. A single trailing LF is accepted.
/// With `check_markers` false only shape and alphabet are validated.
inline Level parse_level(std::string_view text, const GameDef& game, bool check_markers = true) {
    if (!text.empty() && text.back() == '\n') text.remove_suffix(1);
    if (text.empty()) throw LevelError(LevelErrorKind::Empty, "empty level text");
    std::string cells;
    int rows = 0;
    int cols = -1;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(start, end - start);
        if (cols < 0) cols = static_cast<int>(line.size());
        if (static_cast<int>(line.size()) != cols || line.empty())
            throw LevelError(LevelErrorKind::RaggedRows,
                             "row " + std::to_string(rows) + " has length " + std::to_string(line.size()) +
                                 ", expected " + std::to_string(cols),
                             rows, -1);
        for (int c = 0; c < cols; ++c) {
            if (!game.contains(line[c]))
                throw LevelError(LevelErrorKind::UnknownSymbol,
                                 "unknown symbol '" + std::string(1, line[c]) + "' at row " + std::to_string(rows) +
                                     ", col " + std::to_string(c),
                                 rows, c);
        }
        cells.append(line);
        ++rows;
        start = end + 1;
    }
    Level level(rows, cols, std::move(cells), game.game_id);
    if (check_markers) validate_markers(level, game);
    return level;
}

/// Rows joined with LF, no trailing newline.
inline std::string serialize_level(const Level& level) {
    std::string out;
    out.reserve(level.size() + level.rows());
    for (int r = 0; r < level.rows(); ++r) {
        if (r) out.push_back('\n');
        out.append(level.cells(), static_cast<std::size_t>(r) * level.cols(), level.cols());
    }
    return out;
}

inline Level read_level_file(const std::filesystem::path& path, const GameDef& game, bool check_markers = true) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open level " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_level(ss.str(), game, check_markers);
}

inline std::size_t hamming_distance(const Level& a, const Level& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("hamming distance needs equal dimensions");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a.cells()[i] != b.cells()[i];
    return d;
}

/// Single-tile substitution.
struct Perturbation {
    Pos position;
    char old_symbol = 0;
    char new_symbol = 0;

    [[nodiscard]] Level apply(const Level& level) const { return level.with(position, new_symbol); }
    [[nodiscard]] Level revert(const Level& level) const { return level.with(position, old_symbol); }
    friend bool operator==(const Perturbation&, const Perturbation&) = default;
};

/// Every radius-1 substitution, row-major then alphabet order.
inline std::vector<Perturbation> enumerate_radius1(const Level& level, const GameDef& game) {
    std::vector<Perturbation> out;
    out.reserve(level.size() * (game.alphabet.size() - 1));
    for (std::size_t i = 0; i < level.size(); ++i) {
        const char old = level.cells()[i];
        for (char s : game.alphabet)
            if (s != old) out.push_back({level.pos(i), old, s});
    }
    return out;
}

/// One uniformly drawn substitution per cell.
inline std::vector<Perturbation> sample_radius1(const Level& level, const GameDef& game, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<Perturbation> out;
    out.reserve(level.size());
    for (std::size_t i = 0; i < level.size(); ++i) {
        const char old = level.cells()[i];
        std::vector<char> options;
        for (char s : game.alphabet)
            if (s != old) options.push_back(s);
        if (options.empty()) continue;
        out.push_back({level.pos(i), old, options[rng.below(options.size())]});
    }
    return out;
}

}  // namespace tilerobust
