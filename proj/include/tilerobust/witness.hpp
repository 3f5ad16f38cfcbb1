#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "level.hpp"

namespace tilerobust {

struct Edge {
    Pos from;
    Pos to;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Proof of solvability: an edge path (walkers) or a playthrough (crates).
struct SolutionWitness {
    enum class Kind { EdgePath, Playthrough };

    Kind kind = Kind::EdgePath;
    std::vector<Edge> edges;
    std::vector<Level> states;

    static SolutionWitness path(std::vector<Edge> e) {
        SolutionWitness w;
        w.kind = Kind::EdgePath;
        w.edges = std::move(e);
        return w;
    }
    static SolutionWitness playthrough(std::vector<Level> s) {
        SolutionWitness w;
        w.kind = Kind::Playthrough;
        w.states = std::move(s);
        return w;
    }

    [[nodiscard]] std::string_view file_extension() const { return kind == Kind::EdgePath ? ".path" : ".play"; }
    friend bool operator==(const SolutionWitness&, const SolutionWitness&) = default;
};

/// `r1,c1 -> r2,c2`, one edge per line.
inline std::string encode_edge_path(const std::vector<Edge>& edges) {
    std::ostringstream out;
    for (const Edge& e : edges)
        out << e.from.row << ',' << e.from.col << " -> " << e.to.row << ',' << e.to.col << '\n';
    return out.str();
}

inline std::vector<Edge> decode_edge_path(std::string_view text) {
    std::vector<Edge> edges;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Edge e;
        char comma1 = 0, comma2 = 0;
        std::string arrow;
        std::istringstream ls(line);
        if (!(ls >> e.from.row >> comma1 >> e.from.col >> arrow >> e.to.row >> comma2 >> e.to.col) || comma1 != ',' ||
            comma2 != ',' || arrow != "->")
            throw Error("malformed edge on line " + std::to_string(lineno) + ": '" + line + "'");
        edges.push_back(e);
    }
    return edges;
}

/// Level texts separated by one blank line.
inline std::string encode_playthrough(const std::vector<Level>& states) {
    std::string out;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (i) out += '\n';
        out += serialize_level(states[i]);
        out += '\n';
    }
    return out;
}

inline std::vector<Level> decode_playthrough(std::string_view text, const GameDef& game) {
    std::vector<Level> states;
    std::string block;
    std::size_t start = 0;
    auto flush = [&] {
        if (!block.empty()) states.push_back(parse_level(block, game, false));
        block.clear();
    };
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(start, end - start);
        if (line.empty()) {
            flush();
        } else {
            if (!block.empty()) block += '\n';
            block.append(line);
        }
        start = end + 1;
    }
    flush();
    return states;
}

inline std::string encode_witness(const SolutionWitness& w) {
    return w.kind == SolutionWitness::Kind::EdgePath ? encode_edge_path(w.edges) : encode_playthrough(w.states);
}

inline SolutionWitness decode_witness(std::string_view text, SolutionWitness::Kind kind, const GameDef& game) {
    return kind == SolutionWitness::Kind::EdgePath ? SolutionWitness::path(decode_edge_path(text))
                                                   : SolutionWitness::playthrough(decode_playthrough(text, game));
}

inline SolutionWitness read_witness_file(const std::filesystem::path& path, const GameDef& game) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open witness " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto kind = path.extension() == ".play" ? SolutionWitness::Kind::Playthrough : SolutionWitness::Kind::EdgePath;
    return decode_witness(ss.str(), kind, game);
}

}  // namespace tilerobust
