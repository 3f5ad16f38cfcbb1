#include <tilerobust/corpus.hpp>
#include <tilerobust/generator.hpp>
#include <tilerobust/mechanics.hpp>
#include <tilerobust/patterns.hpp>
#include <tilerobust/render.hpp>
#include <tilerobust/robustness.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

namespace tr = tilerobust;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitFailure = 1;  // I/O problems and failed checks
constexpr int kExitUsage = 2;

struct Common {
    std::string games_dir;
    std::string corpus_root = ".";
};

Common common;

/// Corpus paths given relative on the command line live under --corpus-root.
fs::path corpus_path(const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : fs::path(common.corpus_root) / path;
}

std::string default_games_dir() {
    if (const char* env = std::getenv("TILEROBUST_GAMES_DIR")) return env;
#ifdef TILEROBUST_DEFAULT_GAMES_DIR
    return TILEROBUST_DEFAULT_GAMES_DIR;
#else
    return "games";
#endif
}

void log_config(const std::string& command, const json& cfg) {
    std::cerr << "[tilerobust] " << command << ' ' << cfg.dump() << '\n';
}

struct LimitFlags {
    std::size_t max_states = 1'000'000;
    long long time_ms = 10'000;
    bool no_pruning = false;
    bool bfs = false;

    void attach(CLI::App* app) {
        app->add_option("--max-states", max_states, "Search state budget")->capture_default_str();
        app->add_option("--time-limit-ms", time_ms, "Search wall-clock budget in milliseconds")->capture_default_str();
        app->add_flag("--no-pruning", no_pruning, "Disable crate deadlock pruning");
        app->add_flag("--bfs", bfs, "Breadth-first crate search (push-optimal)");
    }
    [[nodiscard]] tr::SearchLimits limits() const {
        tr::SearchLimits l;
        l.max_states = max_states;
        l.max_time = std::chrono::milliseconds(time_ms);
        l.deadlock_pruning = !no_pruning;
        l.crates_search = bfs ? tr::CratesSearch::BreadthFirst : tr::CratesSearch::BestFirst;
        return l;
    }
    [[nodiscard]] json to_json() const {
        return {{"max_states", max_states}, {"time_limit_ms", time_ms}, {"pruning", !no_pruning}, {"bfs", bfs}};
    }
};

std::string pick_variant(const tr::GameDef& game, const std::string& requested) {
    if (!requested.empty()) {
        static_cast<void>(game.variant(requested));  // throws on unknown names
        return requested;
    }
    if (game.variants.empty()) throw tr::ConfigError("game " + game.game_id + " defines no variants");
    return game.variants.begin()->first;
}

tr::PatternSet load_patterns(const tr::GameDef& game, const std::string& variant, const std::string& file) {
    if (!file.empty()) {
        auto ps = tr::read_patterns(file);
        if (ps.game_id != game.game_id) throw tr::ConfigError("pattern file is for game " + ps.game_id);
        return ps;
    }
    return tr::variant_patterns(game, variant);
}

// --- generate ---------------------------------------------------------------

struct GenerateCmd {
    std::string game, variant, label = "solvable", out = "corpus";
    std::size_t n = 10;
    std::uint64_t seed = 0;
    int rows = 0, cols = 0, retry_budget = 500;
    unsigned threads = 0;
    std::string patterns;
    LimitFlags limits;

    void attach(CLI::App* app) {
        app->add_option("--game", game, "Game id")->required();
        app->add_option("--variant", variant, "Game variant (default: first defined)");
        app->add_option("--n", n, "Number of levels")->capture_default_str()->check(CLI::PositiveNumber);
        app->add_option("--seed", seed, "Base seed")->capture_default_str();
        app->add_option("--label", label, "solvable, unsolvable or mixed")
            ->capture_default_str()
            ->check(CLI::IsMember({"solvable", "unsolvable", "mixed"}));
        app->add_option("--out", out, "Corpus root directory")->capture_default_str();
        app->add_option("--rows", rows, "Level rows (default: game default)");
        app->add_option("--cols", cols, "Level columns (default: game default)");
        app->add_option("--retry-budget", retry_budget, "Attempts per level")->capture_default_str();
        app->add_option("--threads", threads, "Worker threads (default: TILEROBUST_THREADS or all cores)");
        app->add_option("--patterns", patterns, "Pattern set file instead of the variant's examples");
        limits.attach(app);
    }

    int run(const tr::GameCatalog& cat) {
        const auto& g = cat.get(game);
        tr::BatchSpec spec;
        spec.variant = pick_variant(g, variant);
        spec.n = n;
        spec.seed = seed;
        spec.labels = tr::parse_label_mode(label);
        if (rows) spec.rows = rows;
        if (cols) spec.cols = cols;
        spec.retry_budget = retry_budget;
        spec.limits = limits.limits();
        spec.threads = threads;
        log_config("generate", {{"game", game},
                                {"variant", spec.variant},
                                {"n", n},
                                {"seed", seed},
                                {"label", label},
                                {"out", corpus_path(out).string()},
                                {"rows", rows ? rows : g.default_rows},
                                {"cols", cols ? cols : g.default_cols},
                                {"retry_budget", retry_budget},
                                {"threads", tr::resolve_threads(threads)},
                                {"limits", limits.to_json()}});
        const auto ps = load_patterns(g, spec.variant, patterns);
        const auto result = tr::batch_generate(g, ps, spec, corpus_path(out));
        const auto& m = result.manifest;
        std::cout << "generated " << m["generated"] << '/' << n << " levels into "
                  << tr::ShardLayout(corpus_path(out), game, spec.variant).dir.string() << " (attempts " << m["attempts_total"]
                  << ", exact duplicates " << m["duplicates"]["exact"] << ")\n";
        if (!result.complete()) {
            std::cerr << "error: " << m["failures"].size() << " level(s) exhausted the retry budget\n";
            return kExitFailure;
        }
        return 0;
    }
};

// --- solve ------------------------------------------------------------------

struct SolveCmd {
    std::string game, witness_dir;
    std::vector<std::string> files;
    LimitFlags limits;

    void attach(CLI::App* app) {
        app->add_option("--game", game, "Game id")->required();
        app->add_option("--witness-dir", witness_dir, "Write solution witnesses here");
        app->add_option("levels", files, "Level files")->required()->check(CLI::ExistingFile);
        limits.attach(app);
    }

    int run(const tr::GameCatalog& cat) {
        const auto& g = cat.get(game);
        log_config("solve", {{"game", game}, {"files", files.size()}, {"limits", limits.to_json()}});
        for (const auto& f : files) {
            const auto level = tr::read_level_file(f, g, false);
            const auto r = tr::check_solvable(level, g, limits.limits());
            std::cout << f << '\t' << tr::solvability_name(r.status) << "\texpanded=" << r.expanded;
            if (g.mechanics == tr::Mechanics::Pusher && r.solvable()) std::cout << "\tpushes=" << r.pushes;
            if (!r.note.empty()) std::cout << '\t' << r.note;
            std::cout << '\n';
            if (!witness_dir.empty() && r.witness) {
                const fs::path out = fs::path(witness_dir) / (fs::path(f).stem().string() +
                                                              std::string(r.witness->file_extension()));
                tr::write_atomic(out, tr::encode_witness(*r.witness));
            }
        }
        return 0;
    }
};

// --- verify -----------------------------------------------------------------

struct VerifyCmd {
    std::string game, shard, variant, patterns;
    bool skip_accept = false;
    LimitFlags limits;

    void attach(CLI::App* app) {
        app->add_option("--game", game, "Game id")->required();
        app->add_option("--shard", shard, "Shard directory (<root>/<game>/<variant>)")->required();
        app->add_option("--variant", variant, "Variant whose examples define acceptability");
        app->add_option("--patterns", patterns, "Pattern set file");
        app->add_flag("--skip-accept", skip_accept, "Do not re-check acceptability");
        limits.attach(app);
    }

    int run(const tr::GameCatalog& cat) {
        const auto& g = cat.get(game);
        const fs::path shard = corpus_path(this->shard);
        std::string v = variant;
        if (v.empty() && fs::exists(tr::ShardLayout(shard).manifest()))
            v = tr::read_manifest(shard).value("variant", std::string{});
        v = pick_variant(g, v);
        log_config("verify", {{"game", game}, {"shard", shard.string()}, {"variant", v}, {"limits", limits.to_json()}});
        std::optional<tr::PatternSet> ps;
        if (!skip_accept) ps = load_patterns(g, v, patterns);
        std::size_t total = 0, passed = 0;
        for (const auto& s : tr::read_shard(shard, g)) {
            ++total;
            std::string problem;
            if (ps && !tr::check_acceptable(s.level, *ps, g, false)) problem = "not acceptable";
            const tr::Label label = s.label.value_or(tr::Label::Solvable);
            if (problem.empty() && label == tr::Label::Solvable) {
                if (!s.solution) {
                    problem = "missing solution";
                } else {
                    const auto w = tr::read_witness_file(*s.solution, g);
                    const auto vr = tr::verify_witness(s.level, w, g);
                    if (!vr.ok())
                        problem = "witness rejected: " + std::string(tr::verify_code_name(vr.code)) + " at step " +
                                  std::to_string(vr.step);
                }
            } else if (problem.empty()) {
                auto lim = limits.limits();
                lim.want_witness = false;
                const auto r = tr::check_solvable(s.level, g, lim);
                if (r.status != tr::Solvability::Unsolvable)
                    problem = "labelled unsolvable but " + std::string(tr::solvability_name(r.status));
            }
            if (problem.empty()) {
                ++passed;
            } else {
                std::cout << s.path.string() << ": " << problem << '\n';
            }
        }
        std::cout << "verified " << passed << '/' << total << " levels\n";
        return passed == total && total > 0 ? 0 : kExitFailure;
    }
};

// --- accept -----------------------------------------------------------------

struct AcceptCmd {
    std::string game, variant, patterns, save;
    std::vector<std::string> files;

    void attach(CLI::App* app) {
        app->add_option("--game", game, "Game id")->required();
        app->add_option("--variant", variant, "Variant whose examples define acceptability");
        app->add_option("--patterns", patterns, "Pattern set file");
        app->add_option("--save-patterns", save, "Write the pattern set in use to this file");
        app->add_option("levels", files, "Level files")->check(CLI::ExistingFile);
    }

    int run(const tr::GameCatalog& cat) {
        const auto& g = cat.get(game);
        const std::string v = pick_variant(g, variant);
        log_config("accept", {{"game", game}, {"variant", v}, {"patterns", patterns}, {"files", files.size()}});
        const auto ps = load_patterns(g, v, patterns);
        if (!save.empty()) tr::write_atomic(save, tr::encode_patterns(ps));
        bool all = true;
        for (const auto& f : files) {
            const auto level = tr::read_level_file(f, g, false);
            const auto res = tr::check_acceptable(level, ps, g);
            all = all && res.acceptable;
            std::cout << f << '\t' << (res.acceptable ? "acceptable" : "unacceptable");
            std::size_t windows = 0;
            for (const auto& viol : res.violations) {
                if (viol.kind == tr::Violation::Kind::Window)
                    ++windows;
                else
                    std::cout << "\tcount '" << viol.symbol << "'=" << viol.fraction;
            }
            if (windows) std::cout << "\twindows=" << windows;
            std::cout << '\n';
        }
        return all ? 0 : kExitFailure;
    }
};

// --- robust-discrete --------------------------------------------------------

struct DiscreteCmd {
    std::string game, variant, patterns, mode = "exhaustive", json_out;
    std::vector<std::string> shards, files;
    std::uint64_t seed = 0;
    LimitFlags limits;

    void attach(CLI::App* app) {
        app->add_option("--game", game, "Game id")->required();
        app->add_option("--variant", variant, "Variant whose examples define acceptability");
        app->add_option("--patterns", patterns, "Pattern set file");
        app->add_option("--shard", shards, "Shard directories to analyse");
        app->add_option("levels", files, "Individual level files")->check(CLI::ExistingFile);
        app->add_option("--mode", mode, "exhaustive or sampled")
            ->capture_default_str()
            ->check(CLI::IsMember({"exhaustive", "sampled"}));
        app->add_option("--seed", seed, "Seed for sampled mode")->capture_default_str();
        app->add_option("--json", json_out, "Also write the report as JSON");
        limits.attach(app);
    }

    int run(const tr::GameCatalog& cat) {
        const auto& g = cat.get(game);
        const std::string v = pick_variant(g, variant);
        log_config("robust-discrete", {{"game", game},
                                       {"variant", v},
                                       {"mode", mode},
                                       {"seed", seed},
                                       {"shards", shards},
                                       {"files", files.size()},
                                       {"limits", limits.to_json()}});
        std::vector<tr::Level> levels;
        for (const auto& s : shards)
            for (auto& l : tr::read_shard(corpus_path(s), g)) levels.push_back(std::move(l.level));
        for (const auto& f : files) levels.push_back(tr::read_level_file(f, g, false));
        if (levels.empty()) throw CLI::ValidationError("robust-discrete", "no levels given");
        const auto ps = load_patterns(g, v, patterns);
        tr::DiscreteOptions opts;
        opts.mode = mode == "sampled" ? tr::PerturbMode::Sampled : tr::PerturbMode::Exhaustive;
        opts.seed = seed;
        opts.limits = limits.limits();
        const auto rep = tr::discrete_nonrobustness(levels, g, &ps, opts);
        std::cout << tr::render_discrete_table({rep});
        if (rep.limit_exceeded) std::cout << "skipped (search limit): " << rep.limit_exceeded << '\n';
        if (!json_out.empty()) tr::write_atomic(json_out, tr::to_json(rep).dump(2) + "\n");
        return 0;
    }
};

// --- robust-continuous ------------------------------------------------------

struct ContinuousCmd {
    std::vector<std::string> points;
    std::vector<double> radii;
    bool raw = false;
    std::string json_out;

    void attach(CLI::App* app) {
        app->add_option("--points", points, "Points files (one table row each)")->required()->check(CLI::ExistingFile);
        app->add_option("--radii", radii, "Radii (default: 1e-5 ... 0.1)")->delimiter(',');
        app->add_flag("--raw", raw, "Skip min-max normalization");
        app->add_option("--json", json_out, "Also write the sweeps as JSON");
    }

    int run(const tr::GameCatalog&) {
        if (radii.empty()) radii = tr::default_radii();
        log_config("robust-continuous", {{"points", points}, {"radii", radii}, {"normalize", !raw}});
        std::vector<std::pair<std::string, tr::RadiusSweep>> rows;
        json j = json::object();
        for (const auto& p : points) {
            auto set = tr::read_points(p);
            if (!raw) set = tr::normalize_points(std::move(set));
            auto sweep = tr::continuous_nonrobustness(set, radii);
            const std::string name = fs::path(p).stem().string();
            j[name] = tr::to_json(sweep);
            rows.emplace_back(name, std::move(sweep));
        }
        std::cout << tr::render_sweep_table(rows);
        if (!json_out.empty()) tr::write_atomic(json_out, j.dump(2) + "\n");
        return 0;
    }
};

// --- render -----------------------------------------------------------------

struct RenderCmd {
    std::string game, level, out;
    int tile = 16;

    void attach(CLI::App* app) {
        app->add_option("--game", game, "Game id")->required();
        app->add_option("level", level, "Level file")->required()->check(CLI::ExistingFile);
        app->add_option("--out", out, "Output PPM path")->required();
        app->add_option("--tile-size", tile, "Pixels per tile")->capture_default_str()->check(CLI::PositiveNumber);
    }

    int run(const tr::GameCatalog& cat) {
        const auto& g = cat.get(game);
        log_config("render", {{"game", game}, {"level", level}, {"out", out}, {"tile_size", tile}});
        const auto img = tr::render_level(tr::read_level_file(level, g, false), g.palette, tile);
        tr::write_ppm(out, img);
        std::cout << out << '\t' << img.width << 'x' << img.height << '\n';
        return 0;
    }
};

// --- stats ------------------------------------------------------------------

struct StatsCmd {
    std::vector<std::string> shards;

    void attach(CLI::App* app) { app->add_option("shards", shards, "Shard directories")->required(); }

    int run(const tr::GameCatalog&) {
        log_config("stats", {{"shards", shards}});
        std::cout << "shard\tgame\tvariant\tlabels\tgenerated\tfiles\tsolvable\tunsolvable\tattempts\tduplicates\n";
        bool consistent = true;
        for (const auto& s : shards) {
            const fs::path dir = corpus_path(s);
            const auto m = tr::read_manifest(dir);
            std::size_t files = 0;
            if (fs::is_directory(dir / "levels"))
                for (const auto& e : fs::directory_iterator(dir / "levels")) files += e.path().extension() == ".lvl";
            const auto generated = m.value("generated", std::size_t{0});
            std::cout << s << '\t' << m.value("game", "?") << '\t' << m.value("variant", "?") << '\t'
                      << m.value("labels", "?") << '\t' << generated << '\t' << files << '\t'
                      << m["tally"].value("solvable", 0) << '\t' << m["tally"].value("unsolvable", 0) << '\t'
                      << m.value("attempts_total", 0) << '\t' << m["duplicates"].value("exact", 0) << '\n';
            if (files != generated) {
                std::cerr << "error: " << s << ": manifest lists " << generated << " levels, found " << files << '\n';
                consistent = false;
            }
        }
        return consistent ? 0 : kExitFailure;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate, solve and measure the robustness of tile-based levels"};
    app.require_subcommand(1);
    common.games_dir = default_games_dir();
    app.add_option("--games-dir", common.games_dir, "Directory of game definition files")->capture_default_str();
    app.add_option("--corpus-root", common.corpus_root, "Base for relative --out and shard paths")
        ->capture_default_str();

    GenerateCmd generate;
    SolveCmd solve;
    VerifyCmd verify;
    AcceptCmd accept;
    DiscreteCmd discrete;
    ContinuousCmd continuous;
    RenderCmd render;
    StatsCmd stats;
    generate.attach(app.add_subcommand("generate", "Generate a corpus shard"));
    solve.attach(app.add_subcommand("solve", "Decide solvability of level files"));
    verify.attach(app.add_subcommand("verify", "Re-check every level and witness of a shard"));
    accept.attach(app.add_subcommand("accept", "Check levels against a pattern set"));
    discrete.attach(app.add_subcommand("robust-discrete", "Single-tile flip rates of levels"));
    continuous.attach(app.add_subcommand("robust-continuous", "Neighbourhood label disagreement of points"));
    render.attach(app.add_subcommand("render", "Render a level to PPM"));
    stats.attach(app.add_subcommand("stats", "Summarize shard manifests"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        const auto catalog = tr::GameCatalog::load(common.games_dir);
        auto* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        if (name == "generate") return generate.run(catalog);
        if (name == "solve") return solve.run(catalog);
        if (name == "verify") return verify.run(catalog);
        if (name == "accept") return accept.run(catalog);
        if (name == "robust-discrete") return discrete.run(catalog);
        if (name == "robust-continuous") return continuous.run(catalog);
        if (name == "render") return render.run(catalog);
        if (name == "stats") return stats.run(catalog);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const tr::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
