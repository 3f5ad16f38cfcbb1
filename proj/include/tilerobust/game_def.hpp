#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "error.hpp"

namespace tilerobust {

enum class Role : std::uint8_t {
    Solid,
    Empty,
    Start,
    Goal,
    Key,
    Door,
    Portal,
    Crate,
    Slot,
    CrateOnSlot,
    StartOnSlot,
};

inline constexpr std::array<std::pair<Role, std::string_view>, 11> kRoleNames{{
    {Role::Solid, "solid"},
    {Role::Empty, "empty"},
    {Role::Start, "start"},
    {Role::Goal, "goal"},
    {Role::Key, "key"},
    {Role::Door, "door"},
    {Role::Portal, "portal"},
    {Role::Crate, "crate"},
    {Role::Slot, "slot"},
    {Role::CrateOnSlot, "crate-on-slot"},
    {Role::StartOnSlot, "start-on-slot"},
}};

inline std::string_view role_name(Role role) {
    for (auto [r, name] : kRoleNames)
        if (r == role) return name;
    return "?";
}

inline Role parse_role(std::string_view name) {
    for (auto [r, n] : kRoleNames)
        if (n == name) return r;
    throw ConfigError("unknown tile role '" + std::string(name) + "'");
}

enum class Mechanics : std::uint8_t { GridWalk, Platformer, Climber, Pusher };

inline std::string_view mechanics_name(Mechanics m) {
    switch (m) {
        case Mechanics::GridWalk: return "grid-walk";
        case Mechanics::Platformer: return "platformer";
        case Mechanics::Climber: return "climber";
        case Mechanics::Pusher: return "pusher";
    }
    return "?";
}

inline Mechanics parse_mechanics(std::string_view name) {
    for (auto m : {Mechanics::GridWalk, Mechanics::Platformer, Mechanics::Climber, Mechanics::Pusher})
        if (mechanics_name(m) == name) return m;
    throw ConfigError("unknown mechanics '" + std::string(name) + "'");
}

/// Tunables of the per-game movement template.
struct MovementParams {
    int jump_height = 4;       // platformer arc rise
    int jump_width = 4;        // platformer arc reach
    int wall_jump_length = 3;  // climber diagonal push-off
    int leap_length = 2;       // climber ledge leap
    bool consume_keys = false; // grid-walk: doors eat a key when opened
};

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline Rgb parse_rgb(std::string_view hex) {
    if (hex.size() != 7 || hex[0] != '#') throw ConfigError("bad color '" + std::string(hex) + "'");
    auto byte = [&](std::size_t at) {
        return static_cast<std::uint8_t>(std::stoi(std::string(hex.substr(at, 2)), nullptr, 16));
    };
    return {byte(1), byte(3), byte(5)};
}

struct VariantDef {
    std::string name;
    std::vector<std::filesystem::path> examples;
    std::map<char, int> specials;  // exact symbol counts enforced by the generator
};

struct GameDef {
    std::string game_id;
    int format_version = 1;
    std::vector<char> alphabet;  // fixed order; defines perturbation order
    std::map<char, Role> role_of;
    std::map<char, char> decor_of;     // decorative variant -> functional class symbol
    std::map<char, char> pattern_base; // overlay marker -> terrain symbol it stands on
    std::vector<std::pair<char, char>> portal_pairs;
    std::map<char, Rgb> palette;
    int default_rows = 16;
    int default_cols = 16;
    Mechanics mechanics = Mechanics::GridWalk;
    MovementParams movement;
    int pattern_k = 3;
    double count_slack = 0.2;
    std::map<std::string, VariantDef> variants;

    [[nodiscard]] bool contains(char symbol) const { return role_of.contains(symbol); }

    [[nodiscard]] Role role(char symbol) const {
        auto it = role_of.find(symbol);
        if (it == role_of.end()) throw Error(std::string("symbol '") + symbol + "' not in alphabet of " + game_id);
        return it->second;
    }

    /// Symbol with the same gameplay function, decorative variants collapsed.
    [[nodiscard]] char functional(char symbol) const {
        auto it = decor_of.find(symbol);
        return it == decor_of.end() ? symbol : it->second;
    }

    /// Symbol used for local-structure windows (start/goal markers overlay terrain).
    [[nodiscard]] char window_symbol(char symbol) const {
        auto it = pattern_base.find(symbol);
        return it == pattern_base.end() ? symbol : it->second;
    }

    [[nodiscard]] bool has_role(Role r) const {
        return std::any_of(role_of.begin(), role_of.end(), [r](const auto& kv) { return kv.second == r; });
    }

    [[nodiscard]] std::optional<char> symbol_for(Role r) const {
        for (char s : alphabet)
            if (role(s) == r && !decor_of.contains(s)) return s;
        return std::nullopt;
    }

    /// Portal symbol a traveller arrives at when stepping on `symbol`.
    [[nodiscard]] std::optional<char> portal_partner(char symbol) const {
        for (auto [a, b] : portal_pairs) {
            if (a == symbol) return b;
            if (b == symbol) return a;
        }
        return std::nullopt;
    }

    [[nodiscard]] const VariantDef& variant(const std::string& name) const {
        auto it = variants.find(name);
        if (it == variants.end()) throw ConfigError("game " + game_id + " has no variant '" + name + "'");
        return it->second;
    }

    void validate() const {
        if (alphabet.empty()) throw ConfigError(game_id + ": empty alphabet");
        if (role_of.size() != alphabet.size()) throw ConfigError(game_id + ": duplicate symbols in alphabet");
        if (!role_of.contains('{') || role_of.at('{') != Role::Start)
            throw ConfigError(game_id + ": '{' must be present with role start");
        for (auto [variant, cls] : decor_of) {
            if (!contains(cls) || decor_of.contains(cls))
                throw ConfigError(game_id + ": decor variant '" + std::string(1, variant) + "' maps to an undefined class");
            if (role(cls) != role(variant))
                throw ConfigError(game_id + ": decor variant '" + std::string(1, variant) + "' role differs from its class");
        }
        for (auto [marker, base] : pattern_base)
            if (!contains(marker) || !contains(base))
                throw ConfigError(game_id + ": pattern_base references unknown symbol");
        for (auto [a, b] : portal_pairs)
            if (!contains(a) || !contains(b) || role(a) != Role::Portal || role(b) != Role::Portal)
                throw ConfigError(game_id + ": portal pair must reference portal tiles");
        if (pattern_k < 1) throw ConfigError(game_id + ": pattern k must be >= 1");
        if (default_rows < 1 || default_cols < 1) throw ConfigError(game_id + ": bad default dims");
    }
};

namespace detail {

inline char single_char(const nlohmann::json& j, std::string_view what) {
    const auto s = j.get<std::string>();
    if (s.size() != 1) throw ConfigError(std::string(what) + " must be a single character, got '" + s + "'");
    return s[0];
}

}  // namespace detail

/// Builds a GameDef from its JSON config; `base_dir` resolves example paths.
inline GameDef game_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    GameDef g;
    try {
        g.game_id = j.at("game").get<std::string>();
        g.format_version = j.value("format_version", 1);
        g.mechanics = parse_mechanics(j.at("mechanics").get<std::string>());
        const auto& dims = j.at("dims");
        g.default_rows = dims.at(0).get<int>();
        g.default_cols = dims.at(1).get<int>();
        for (const auto& t : j.at("tiles")) {
            const char s = detail::single_char(t.at("symbol"), "tile symbol");
            g.alphabet.push_back(s);
            g.role_of[s] = parse_role(t.at("role").get<std::string>());
            if (t.contains("decor_of")) g.decor_of[s] = detail::single_char(t.at("decor_of"), "decor_of");
            if (t.contains("color")) g.palette[s] = parse_rgb(t.at("color").get<std::string>());
        }
        if (j.contains("pattern_base"))
            for (const auto& [k, v] : j.at("pattern_base").items())
                g.pattern_base[detail::single_char(k, "pattern_base key")] = detail::single_char(v, "pattern_base value");
        if (j.contains("portal_pairs"))
            for (const auto& p : j.at("portal_pairs"))
                g.portal_pairs.emplace_back(detail::single_char(p.at(0), "portal"), detail::single_char(p.at(1), "portal"));
        if (j.contains("movement")) {
            const auto& m = j.at("movement");
            g.movement.jump_height = m.value("jump_height", g.movement.jump_height);
            g.movement.jump_width = m.value("jump_width", g.movement.jump_width);
            g.movement.wall_jump_length = m.value("wall_jump_length", g.movement.wall_jump_length);
            g.movement.leap_length = m.value("leap_length", g.movement.leap_length);
            g.movement.consume_keys = m.value("consume_keys", g.movement.consume_keys);
        }
        if (j.contains("patterns")) {
            g.pattern_k = j.at("patterns").value("k", g.pattern_k);
            g.count_slack = j.at("patterns").value("count_slack", g.count_slack);
        }
        if (j.contains("variants")) {
            for (const auto& [name, v] : j.at("variants").items()) {
                VariantDef vd;
                vd.name = name;
                for (const auto& e : v.at("examples")) vd.examples.push_back(base_dir / e.get<std::string>());
                if (v.contains("specials"))
                    for (const auto& [sym, count] : v.at("specials").items())
                        vd.specials[detail::single_char(sym, "special")] = count.get<int>();
                g.variants.emplace(name, std::move(vd));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("game config: " + std::string(e.what()));
    }
    g.validate();
    return g;
}

inline GameDef load_game_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open game config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return game_from_json(j, path.parent_path());
}

/// All game definitions found in a directory (`<dir>/<game>.json`).
class GameCatalog {
public:
    static GameCatalog load(const std::filesystem::path& dir) {
        GameCatalog cat;
        if (!std::filesystem::is_directory(dir)) throw IoError("games directory not found: " + dir.string());
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            GameDef g = load_game_file(f);
            cat.games_.emplace(g.game_id, std::move(g));
        }
        return cat;
    }

    [[nodiscard]] const GameDef& get(const std::string& id) const {
        auto it = games_.find(id);
        if (it == games_.end()) throw ConfigError("unknown game '" + id + "'");
        return it->second;
    }

    [[nodiscard]] std::vector<std::string> ids() const {
        std::vector<std::string> out;
        for (const auto& [id, g] : games_) out.push_back(id);
        return out;
    }

private:
    std::map<std::string, GameDef> games_;
};

}  // namespace tilerobust
