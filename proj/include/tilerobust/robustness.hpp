#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "game_def.hpp"
#include "level.hpp"
#include "mechanics.hpp"
#include "patterns.hpp"

namespace tilerobust {

// ---------------------------------------------------------------------------
// discrete: radius-1 tile substitutions

/// Acceptability of single-tile edits of a fixed level, answered by
/// re-checking only the windows that overlap the edited cell.
class AcceptabilityProbe {
public:
    AcceptabilityProbe(const Level& level, const PatternSet& ps, const GameDef& game)
        : level_(level), ps_(ps), game_(game), view_(terrain_view(level, game)) {
        const int k = ps.k;
        wr_ = level.rows() + k - 1;
        wc_ = level.cols() + k - 1;
        window_ok_.assign(static_cast<std::size_t>(wr_) * wc_, 1);
        for (int r0 = -(k - 1); r0 < level.rows(); ++r0) {
            for (int c0 = -(k - 1); c0 < level.cols(); ++c0) {
                if (ps.windows.contains(window_at(view_, level.rows(), level.cols(), r0, c0, k, ps.border))) continue;
                window_ok_[slot(r0, c0)] = 0;
                ++bad_windows_;
            }
        }
        for (char c : view_) ++counts_[c];
        base_ = bad_windows_ == 0 && counts_fit(counts_);
    }

    [[nodiscard]] bool base() const { return base_; }

    /// Acceptability of the level with `pos` replaced by `symbol`.
    [[nodiscard]] bool accepts(Pos pos, char symbol) const {
        const char before = view_[level_.index(pos)];
        const char after = game_.window_symbol(symbol);
        if (before == after) return base_;
        std::map<char, int> counts = counts_;
        --counts[before];
        ++counts[after];
        if (!counts_fit(counts)) return false;

        std::vector<char> view = view_;
        view[level_.index(pos)] = after;
        int bad = bad_windows_;
        const int k = ps_.k;
        for (int r0 = pos.row - k + 1; r0 <= pos.row; ++r0) {
            for (int c0 = pos.col - k + 1; c0 <= pos.col; ++c0) {
                const bool ok = ps_.windows.contains(window_at(view, level_.rows(), level_.cols(), r0, c0, k, ps_.border));
                bad += static_cast<int>(window_ok_[slot(r0, c0)]) - static_cast<int>(ok);
            }
        }
        return bad == 0;
    }

private:
    [[nodiscard]] std::size_t slot(int r0, int c0) const {
        return static_cast<std::size_t>(r0 + ps_.k - 1) * wc_ + (c0 + ps_.k - 1);
    }

    [[nodiscard]] bool counts_fit(const std::map<char, int>& counts) const {
        const double n = static_cast<double>(view_.size());
        for (auto [s, range] : ps_.counts) {
            auto it = counts.find(s);
            const double f = it == counts.end() ? 0.0 : it->second / n;
            if (f < range.first - 1e-12 || f > range.second + 1e-12) return false;
        }
        for (auto [s, c] : counts)
            if (c > 0 && !ps_.counts.contains(s)) return false;
        return true;
    }

    const Level& level_;
    const PatternSet& ps_;
    const GameDef& game_;
    std::vector<char> view_;
    int wr_ = 0;
    int wc_ = 0;
    std::vector<std::uint8_t> window_ok_;
    int bad_windows_ = 0;
    std::map<char, int> counts_;
    bool base_ = true;
};

enum class PerturbMode { Exhaustive, Sampled };

struct DiscreteOptions {
    PerturbMode mode = PerturbMode::Exhaustive;
    std::uint64_t seed = 0;  // sampled mode; level i uses derive_seed(seed, i)
    SearchLimits limits{};
};

struct LevelFlips {
    std::size_t perturbations = 0;
    std::size_t solvability_decided = 0;  // base and perturbed both decided
    std::size_t solvability_flips = 0;
    std::size_t acceptability_flips = 0;
    bool base_decided = true;
    bool base_solvable = false;
    bool base_acceptable = true;

    [[nodiscard]] std::optional<double> solvability_fraction() const {
        if (!base_decided || solvability_decided == 0) return std::nullopt;
        return static_cast<double>(solvability_flips) / static_cast<double>(solvability_decided);
    }
    [[nodiscard]] std::optional<double> acceptability_fraction() const {
        if (perturbations == 0) return std::nullopt;
        return static_cast<double>(acceptability_flips) / static_cast<double>(perturbations);
    }
};

struct DiscreteReport {
    std::string game_id;
    std::vector<LevelFlips> levels;
    double solvability = 0.0;    // mean per-level flip fraction, in [0, 1]
    double acceptability = 0.0;  // NaN-free: 0 when no level contributes
    std::size_t solvability_levels = 0;
    std::size_t acceptability_levels = 0;
    std::size_t limit_exceeded = 0;  // perturbations skipped as undecided
    std::size_t perturbations = 0;
    bool has_acceptability = false;
};

inline LevelFlips level_flips(const Level& level, const GameDef& game, const PatternSet* patterns,
                              const std::vector<Perturbation>& perturbations, const SearchLimits& limits,
                              std::size_t* limit_exceeded = nullptr) {
    SearchLimits lim = limits;
    lim.want_witness = false;
    LevelFlips out;
    out.perturbations = perturbations.size();
    const SolveResult base = check_solvable(level, game, lim);
    out.base_decided = base.decided();
    out.base_solvable = base.solvable();
    std::optional<AcceptabilityProbe> probe;
    if (patterns) {
        probe.emplace(level, *patterns, game);
        out.base_acceptable = probe->base();
    }
    Level work = level;
    for (const Perturbation& p : perturbations) {
        if (probe && probe->accepts(p.position, p.new_symbol) != out.base_acceptable) ++out.acceptability_flips;
        if (!out.base_decided) continue;
        work.set(p.position, p.new_symbol);
        const SolveResult r = check_solvable(work, game, lim);
        work.set(p.position, p.old_symbol);
        if (!r.decided()) {
            if (limit_exceeded) ++*limit_exceeded;
            continue;
        }
        ++out.solvability_decided;
        if (r.solvable() != out.base_solvable) ++out.solvability_flips;
    }
    return out;
}

inline DiscreteReport discrete_nonrobustness(const std::vector<Level>& levels, const GameDef& game,
                                             const PatternSet* patterns, const DiscreteOptions& opts = {}) {
    DiscreteReport rep;
    rep.game_id = game.game_id;
    rep.has_acceptability = patterns != nullptr;
    if (levels.empty()) throw Error("discrete analysis needs at least one level");
    for (const Level& l : levels)
        if (l.game_id() != game.game_id) throw Error("level of game " + l.game_id() + " in a " + game.game_id + " batch");
    double s_sum = 0.0, a_sum = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto perts = opts.mode == PerturbMode::Exhaustive
                               ? enumerate_radius1(levels[i], game)
                               : sample_radius1(levels[i], game, derive_seed(opts.seed, i));
        LevelFlips f = level_flips(levels[i], game, patterns, perts, opts.limits, &rep.limit_exceeded);
        if (auto s = f.solvability_fraction()) {
            s_sum += *s;
            ++rep.solvability_levels;
        }
        if (patterns) {
            if (auto a = f.acceptability_fraction()) {
                a_sum += *a;
                ++rep.acceptability_levels;
            }
        }
        rep.perturbations += f.perturbations;
        rep.levels.push_back(f);
    }
    if (rep.solvability_levels == 0) throw Error("every perturbation hit the search limits; nothing was decided");
    if (rep.solvability_levels) rep.solvability = s_sum / static_cast<double>(rep.solvability_levels);
    if (rep.acceptability_levels) rep.acceptability = a_sum / static_cast<double>(rep.acceptability_levels);
    return rep;
}

// ---------------------------------------------------------------------------
// continuous: labelled points

struct LabeledPointSet {
    int dim = 0;
    std::vector<double> coords;  // row-major, size() * dim values
    std::vector<int> labels;     // 1 = solvable, 0 = unsolvable

    [[nodiscard]] std::size_t size() const { return labels.size(); }
    [[nodiscard]] const double* point(std::size_t i) const { return coords.data() + i * static_cast<std::size_t>(dim); }

    void add(const std::vector<double>& p, int label) {
        if (dim == 0 && labels.empty()) dim = static_cast<int>(p.size());
        if (static_cast<int>(p.size()) != dim) throw Error("point dimension mismatch");
        coords.insert(coords.end(), p.begin(), p.end());
        labels.push_back(label);
    }
};

inline int parse_point_label(std::string_view s) {
    if (s == "1" || s == "solvable") return 1;
    if (s == "0" || s == "unsolvable") return 0;
    throw Error("unknown point label '" + std::string(s) + "'");
}

/// Accepts comma, tab or space separated rows of `dim` numbers followed by a
/// label. A `# dim=d` header line fixes the dimension; other '#' lines are
/// comments.
inline LabeledPointSet parse_points(std::string_view text) {
    LabeledPointSet out;
    int declared = 0;
    std::size_t line_no = 0;
    std::string line;
    std::istringstream in{std::string(text)};
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            const auto at = line.find("dim=");
            if (at != std::string::npos) declared = std::stoi(line.substr(at + 4));
            continue;
        }
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',' || c == '\t' || c == ' ') {
                if (!cur.empty()) fields.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (!cur.empty()) fields.push_back(cur);
        if (fields.size() < 2) throw Error("points line " + std::to_string(line_no) + ": too few fields");
        std::vector<double> p;
        for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
            double v = 0;
            const auto& f = fields[i];
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc{} || ptr != f.data() + f.size())
                throw Error("points line " + std::to_string(line_no) + ": bad number '" + f + "'");
            p.push_back(v);
        }
        if (declared && static_cast<int>(p.size()) != declared)
            throw Error("points line " + std::to_string(line_no) + ": expected " + std::to_string(declared) +
                        " coordinates");
        out.add(p, parse_point_label(fields.back()));
    }
    if (declared) out.dim = declared;
    return out;
}

inline LabeledPointSet read_points(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_points(ss.str());
}

inline std::string encode_points(const LabeledPointSet& pts) {
    std::ostringstream out;
    out << "# dim=" << pts.dim << '\n';
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (int d = 0; d < pts.dim; ++d) out << detail::format_double(pts.point(i)[d]) << ',';
        out << (pts.labels[i] ? "solvable" : "unsolvable") << '\n';
    }
    return out.str();
}

/// Min-max scales every dimension to [0, 1]; constant dimensions become 0.
inline LabeledPointSet normalize_points(LabeledPointSet pts) {
    if (pts.size() == 0) throw Error("cannot normalize an empty point set");
    for (int d = 0; d < pts.dim; ++d) {
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            lo = std::min(lo, pts.point(i)[d]);
            hi = std::max(hi, pts.point(i)[d]);
        }
        const double span = hi - lo;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double& v = pts.coords[i * pts.dim + d];
            v = span > 0 ? (v - lo) / span : 0.0;
        }
    }
    return pts;
}

inline const std::vector<double>& default_radii() {
    static const std::vector<double> r{1e-5, 5e-5, 1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2, 1e-1};
    return r;
}

struct RadiusSweep {
    std::vector<double> radii;
    std::vector<double> fractions;  // ND_r in [0, 1], aligned with radii
    [[nodiscard]] double average() const {
        if (fractions.empty()) return 0.0;
        double s = 0;
        for (double f : fractions) s += f;
        return s / static_cast<double>(fractions.size());
    }
};

/// ND_r for several radii at once: the mean over points of the share of
/// r-neighbours (Euclidean, closed ball) carrying the other label. The point
/// itself and same-label duplicates at distance zero are not neighbours; a
/// point without neighbours contributes 0.
inline RadiusSweep continuous_nonrobustness(const LabeledPointSet& pts, std::vector<double> radii = default_radii()) {
    RadiusSweep out;
    out.radii = radii;
    out.fractions.assign(radii.size(), 0.0);
    const std::size_t n = pts.size();
    if (n < 2) throw Error("continuous analysis needs at least two points");
    for (std::size_t j = 0; j < radii.size(); ++j)
        if (radii[j] < 0 || (j && radii[j] <= radii[j - 1])) throw Error("radii must be non-negative and increasing");
    std::vector<double> r2(radii.size());
    for (std::size_t j = 0; j < radii.size(); ++j) r2[j] = radii[j] * radii[j];
    const double max_r2 = radii.empty() ? 0.0 : *std::max_element(r2.begin(), r2.end());

    std::vector<std::size_t> same(radii.size()), diff(radii.size());
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(same.begin(), same.end(), 0);
        std::fill(diff.begin(), diff.end(), 0);
        const double* a = pts.point(i);
        for (std::size_t k = 0; k < n; ++k) {
            if (k == i) continue;
            const double* b = pts.point(k);
            double d2 = 0;
            for (int d = 0; d < pts.dim && d2 <= max_r2; ++d) d2 += (a[d] - b[d]) * (a[d] - b[d]);
            if (d2 > max_r2) continue;
            const bool other = pts.labels[k] != pts.labels[i];
            if (d2 == 0.0 && !other) continue;
            for (std::size_t j = 0; j < r2.size(); ++j) {
                if (d2 <= r2[j]) ++(other ? diff[j] : same[j]);
            }
        }
        for (std::size_t j = 0; j < radii.size(); ++j) {
            const std::size_t total = same[j] + diff[j];
            if (total) out.fractions[j] += static_cast<double>(diff[j]) / static_cast<double>(total);
        }
    }
    for (double& f : out.fractions) f /= static_cast<double>(n);
    return out;
}

inline double continuous_nonrobustness(const LabeledPointSet& pts, double radius) {
    return continuous_nonrobustness(pts, std::vector<double>{radius}).fractions.front();
}

// ---------------------------------------------------------------------------
// reports

inline std::string percent1(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", fraction * 100.0);
    return buf;
}

inline std::string radius_label(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", r);
    return buf;
}

inline std::string render_sweep_table(const std::vector<std::pair<std::string, RadiusSweep>>& rows) {
    std::ostringstream out;
    out << "dataset";
    const std::vector<double> radii = rows.empty() ? default_radii() : rows.front().second.radii;
    for (double r : radii) out << '\t' << radius_label(r);
    out << "\tavg\n";
    for (const auto& [name, sweep] : rows) {
        out << name;
        for (double f : sweep.fractions) out << '\t' << percent1(f);
        out << '\t' << percent1(sweep.average()) << '\n';
    }
    return out.str();
}

inline std::string render_discrete_table(const std::vector<DiscreteReport>& reports) {
    std::ostringstream out;
    out << "game\tsolvability\tacceptability\tlevels\n";
    for (const auto& r : reports) {
        out << r.game_id << '\t' << percent1(r.solvability) << '\t'
            << (r.has_acceptability ? percent1(r.acceptability) : std::string("-")) << '\t' << r.levels.size()
            << '\n';
    }
    return out.str();
}

inline nlohmann::json to_json(const RadiusSweep& s) {
    nlohmann::json j;
    j["radii"] = s.radii;
    j["fractions"] = s.fractions;
    j["average"] = s.average();
    return j;
}

inline nlohmann::json to_json(const DiscreteReport& r) {
    nlohmann::json j;
    j["game"] = r.game_id;
    j["solvability"] = r.solvability;
    j["solvability_levels"] = r.solvability_levels;
    if (r.has_acceptability) {
        j["acceptability"] = r.acceptability;
        j["acceptability_levels"] = r.acceptability_levels;
    }
    j["limit_exceeded"] = r.limit_exceeded;
    j["perturbations"] = r.perturbations;
    auto& lv = j["levels"] = nlohmann::json::array();
    for (const auto& f : r.levels) {
        nlohmann::json e;
        e["perturbations"] = f.perturbations;
        e["solvability_decided"] = f.solvability_decided;
        e["solvability_flips"] = f.solvability_flips;
        e["base_solvable"] = f.base_solvable;
        e["base_decided"] = f.base_decided;
        if (r.has_acceptability) {
            e["acceptability_flips"] = f.acceptability_flips;
            e["base_acceptable"] = f.base_acceptable;
        }
        lv.push_back(std::move(e));
    }
    return j;
}

}  // namespace tilerobust
