#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "game_def.hpp"
#include "level.hpp"

namespace tilerobust {

struct Image {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;  // row-major

    [[nodiscard]] const Rgb& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    friend bool operator==(const Image&, const Image&) = default;
};

using Palette = std::map<char, Rgb>;

/// Flat-color raster: every tile becomes a tile_size x tile_size block.
inline Image render_level(const Level& level, const Palette& palette, int tile_size = 16) {
    if (tile_size < 1) throw Error("tile size must be positive");
    Image img;
    img.width = level.cols() * tile_size;
    img.height = level.rows() * tile_size;
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    for (int r = 0; r < level.rows(); ++r) {
        for (int c = 0; c < level.cols(); ++c) {
            auto it = palette.find(level.at(r, c));
            if (it == palette.end())
                throw Error("palette has no color for symbol '" + std::string(1, level.at(r, c)) + "'");
            for (int y = r * tile_size; y < (r + 1) * tile_size; ++y)
                for (int x = c * tile_size; x < (c + 1) * tile_size; ++x)
                    img.pixels[static_cast<std::size_t>(y) * img.width + x] = it->second;
        }
    }
    return img;
}

/// Plain (ASCII) PPM, one pixel per line.
inline std::string encode_ppm(const Image& img) {
    std::ostringstream out;
    out << "P3\n" << img.width << ' ' << img.height << "\n255\n";
    for (const Rgb& p : img.pixels) out << int(p.r) << ' ' << int(p.g) << ' ' << int(p.b) << '\n';
    return out.str();
}

inline Image decode_ppm(const std::string& text) {
    std::istringstream in(text);
    std::string magic;
    in >> magic;
    if (magic != "P3") throw Error("not a plain PPM image");
    auto next_int = [&in]() {
        // skip comments
        in >> std::ws;
        while (in.peek() == '#') {
            std::string line;
            std::getline(in, line);
            in >> std::ws;
        }
        int v = 0;
        if (!(in >> v)) throw Error("truncated PPM image");
        return v;
    };
    Image img;
    img.width = next_int();
    img.height = next_int();
    const int maxval = next_int();
    if (img.width < 0 || img.height < 0 || maxval != 255) throw Error("unsupported PPM header");
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    for (auto& p : img.pixels) {
        p.r = static_cast<std::uint8_t>(next_int());
        p.g = static_cast<std::uint8_t>(next_int());
        p.b = static_cast<std::uint8_t>(next_int());
    }
    return img;
}

inline void write_ppm(const std::filesystem::path& path, const Image& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << encode_ppm(img);
}

inline Image read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_ppm(ss.str());
}

}  // namespace tilerobust
