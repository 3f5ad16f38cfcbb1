#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "game_def.hpp"
#include "generator.hpp"
#include "level.hpp"
#include "mechanics.hpp"
#include "patterns.hpp"
#include "witness.hpp"

namespace tilerobust {

namespace fs = std::filesystem;

/// Writes through a sibling temp file and renames it into place, so readers
/// never observe a half-written file.
inline void write_atomic(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename into " + path.string() + ": " + ec.message());
}

inline std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Paths of one shard: `<root>/<game>/<variant>/...`.
struct ShardLayout {
    fs::path dir;

    ShardLayout(const fs::path& root, const std::string& game, const std::string& variant)
        : dir(root / game / variant) {}
    explicit ShardLayout(fs::path shard_dir) : dir(std::move(shard_dir)) {}

    static std::string stem(std::size_t index) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%05zu", index);
        return buf;
    }
    [[nodiscard]] fs::path level(std::size_t i) const { return dir / "levels" / (stem(i) + ".lvl"); }
    [[nodiscard]] fs::path solution(std::size_t i, std::string_view ext) const {
        return dir / "solutions" / (stem(i) + std::string(ext));
    }
    [[nodiscard]] fs::path meta(std::size_t i) const { return dir / "meta" / (stem(i) + ".meta"); }
    [[nodiscard]] fs::path manifest() const { return dir / "manifest"; }
};

enum class LabelMode { Solvable, Unsolvable, Mixed };

inline LabelMode parse_label_mode(std::string_view s) {
    if (s == "solvable") return LabelMode::Solvable;
    if (s == "unsolvable") return LabelMode::Unsolvable;
    if (s == "mixed") return LabelMode::Mixed;
    throw ConfigError("label must be solvable, unsolvable or mixed, not '" + std::string(s) + "'");
}

inline std::string_view label_mode_name(LabelMode m) {
    switch (m) {
        case LabelMode::Solvable: return "solvable";
        case LabelMode::Unsolvable: return "unsolvable";
        case LabelMode::Mixed: return "mixed";
    }
    return "?";
}

/// Mixed shards alternate, starting with a solvable level at index 0.
inline Label label_for(LabelMode mode, std::size_t index) {
    if (mode == LabelMode::Mixed) return index % 2 == 0 ? Label::Solvable : Label::Unsolvable;
    return mode == LabelMode::Solvable ? Label::Solvable : Label::Unsolvable;
}

struct BatchSpec {
    std::string variant;
    std::size_t n = 1;
    std::uint64_t seed = 0;
    LabelMode labels = LabelMode::Solvable;
    std::optional<int> rows, cols;
    int retry_budget = 500;
    SearchLimits limits{};
    unsigned threads = 0;  // 0: TILEROBUST_THREADS or hardware concurrency
};

inline unsigned resolve_threads(unsigned requested) {
    if (requested) return requested;
    if (const char* env = std::getenv("TILEROBUST_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

struct BatchEntry {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    Label label = Label::Solvable;
    bool ok = false;
    int attempts = 0;
    std::string error;
    std::optional<Level> level;
    std::optional<SolutionWitness> witness;
};

struct BatchResult {
    nlohmann::json manifest;
    std::vector<BatchEntry> entries;
    [[nodiscard]] bool complete() const {
        return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.ok; });
    }
};

/// Exact-text duplicate groups (indices), only groups of size >= 2.
inline std::vector<std::vector<std::size_t>> duplicate_groups(const std::vector<BatchEntry>& entries) {
    std::map<std::string, std::vector<std::size_t>> by_text;
    for (const auto& e : entries)
        if (e.level) by_text[e.level->cells()].push_back(e.index);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [text, ids] : by_text)
        if (ids.size() > 1) out.push_back(ids);
    std::sort(out.begin(), out.end());
    return out;
}

inline nlohmann::json level_meta(const GameDef& game, const BatchSpec& spec, const BatchEntry& e) {
    nlohmann::json m;
    m["game"] = game.game_id;
    m["variant"] = spec.variant;
    m["index"] = e.index;
    m["seed"] = e.seed;
    m["label"] = label_name(e.label);
    m["attempts"] = e.attempts;
    m["rows"] = e.level->rows();
    m["cols"] = e.level->cols();
    if (e.witness) m["solution"] = ShardLayout::stem(e.index) + std::string(e.witness->file_extension());
    return m;
}

/// Generates `spec.n` levels into `<root>/<game>/<variant>` and writes the
/// manifest last. Files depend only on (game, patterns, spec), never on the
/// thread count. Failed indices are listed in the manifest and the shard is
/// marked incomplete.
inline BatchResult batch_generate(const GameDef& game, const PatternSet& ps, const BatchSpec& spec,
                                  const fs::path& root) {
    if (spec.n < 1) throw ConfigError("batch size must be at least 1");
    if (spec.retry_budget < 1) throw ConfigError("retry budget must be at least 1");
    const ShardLayout layout(root, game.game_id, spec.variant);
    GenSpec base = variant_spec(game, spec.variant, Label::Solvable, 0);
    if (spec.rows) base.rows = *spec.rows;
    if (spec.cols) base.cols = *spec.cols;
    base.retry_budget = spec.retry_budget;
    base.limits = spec.limits;

    BatchResult result;
    result.entries.resize(spec.n);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr fatal;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= spec.n) return;
            BatchEntry& e = result.entries[i];
            e.index = i;
            e.seed = derive_seed(spec.seed, i);
            e.label = label_for(spec.labels, i);
            GenSpec gs = base;
            gs.seed = e.seed;
            gs.target = e.label;
            try {
                GenResult r = generate_level(game, ps, gs);
                e.ok = true;
                e.attempts = r.attempts;
                e.level = std::move(r.level);
                e.witness = std::move(r.witness);
                write_atomic(layout.level(i), serialize_level(*e.level) + "\n");
                if (e.witness) write_atomic(layout.solution(i, e.witness->file_extension()), encode_witness(*e.witness));
                write_atomic(layout.meta(i), level_meta(game, spec, e).dump(2) + "\n");
            } catch (const GenerationError& err) {
                e.attempts = err.attempts();
                e.error = err.what();
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!fatal) fatal = std::current_exception();
                next = spec.n;
            }
        }
    };
    const unsigned threads = std::min<std::size_t>(resolve_threads(spec.threads), spec.n);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (fatal) std::rethrow_exception(fatal);

    nlohmann::json& m = result.manifest;
    m["format"] = 1;
    m["game"] = game.game_id;
    m["variant"] = spec.variant;
    m["base_seed"] = spec.seed;
    m["labels"] = label_mode_name(spec.labels);
    m["rows"] = base.rows;
    m["cols"] = base.cols;
    m["retry_budget"] = spec.retry_budget;
    m["requested"] = spec.n;
    std::size_t generated = 0, solvable = 0, unsolvable = 0, attempts = 0;
    auto& levels = m["levels"] = nlohmann::json::array();
    auto& failures = m["failures"] = nlohmann::json::array();
    for (const auto& e : result.entries) {
        attempts += static_cast<std::size_t>(e.attempts);
        if (!e.ok) {
            failures.push_back({{"index", e.index}, {"seed", e.seed}, {"attempts", e.attempts}, {"error", e.error}});
            continue;
        }
        ++generated;
        (e.label == Label::Solvable ? solvable : unsolvable) += 1;
        levels.push_back({{"index", e.index},
                          {"file", "levels/" + ShardLayout::stem(e.index) + ".lvl"},
                          {"seed", e.seed},
                          {"label", label_name(e.label)},
                          {"attempts", e.attempts}});
    }
    m["generated"] = generated;
    m["complete"] = generated == spec.n;
    m["tally"] = {{"solvable", solvable}, {"unsolvable", unsolvable}};
    m["attempts_total"] = attempts;
    const auto dups = duplicate_groups(result.entries);
    std::size_t extra = 0;
    for (const auto& g : dups) extra += g.size() - 1;
    m["duplicates"] = {{"exact", extra}, {"groups", dups}};
    write_atomic(layout.manifest(), m.dump(2) + "\n");
    return result;
}

/// One level of an existing shard, as found on disk.
struct ShardLevel {
    std::size_t index = 0;
    fs::path path;
    Level level;
    std::optional<Label> label;
    std::optional<fs::path> solution;
};

inline nlohmann::json read_manifest(const fs::path& shard_dir) {
    const auto text = read_text(ShardLayout(shard_dir).manifest());
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed manifest in " + shard_dir.string() + ": " + e.what());
    }
}

/// Levels of a shard in index order. Labels come from the meta files when
/// present. Marker checks are skipped so damaged levels can still be
/// inspected.
inline std::vector<ShardLevel> read_shard(const fs::path& shard_dir, const GameDef& game) {
    const ShardLayout layout(shard_dir);
    const fs::path levels_dir = shard_dir / "levels";
    if (!fs::is_directory(levels_dir)) throw IoError("no levels directory in " + shard_dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(levels_dir))
        if (entry.path().extension() == ".lvl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<ShardLevel> out;
    for (const auto& f : files) {
        ShardLevel s;
        s.path = f;
        s.index = static_cast<std::size_t>(std::stoull(f.stem().string()));
        s.level = read_level_file(f, game, false);
        if (fs::exists(layout.meta(s.index))) {
            const auto meta = nlohmann::json::parse(read_text(layout.meta(s.index)));
            if (meta.contains("label")) s.label = parse_label(meta["label"].get<std::string>());
        }
        for (std::string_view ext : {".path", ".play"})
            if (fs::exists(layout.solution(s.index, ext))) s.solution = layout.solution(s.index, ext);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace tilerobust
