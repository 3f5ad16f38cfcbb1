#include "support.hpp"

#include <tilerobust/generator.hpp>
#include <tilerobust/level.hpp>
#include <tilerobust/patterns.hpp>

#include <gtest/gtest.h>

#include <set>

namespace tr = tilerobust;
using testsupport::game;
using testsupport::grid;

TEST(ParseLevel, RoundTripKeepsCells) {
    const auto& cave = game("cave");
    const std::string text = "XXXX\nX{-X\nX-}X\nXXXX";
    const auto lvl = tr::parse_level(text, cave);
    EXPECT_EQ(lvl.rows(), 4);
    EXPECT_EQ(lvl.cols(), 4);
    EXPECT_EQ(tr::serialize_level(lvl), text);
    EXPECT_EQ(tr::parse_level(text + "\n", cave), lvl);
}

TEST(ParseLevel, RaggedRowsRejected) {
    try {
        tr::parse_level("XXX\nX{\nX}X", game("cave"));
        FAIL() << "expected a LevelError";
    } catch (const tr::LevelError& e) {
        EXPECT_EQ(e.kind(), tr::LevelErrorKind::RaggedRows);
        EXPECT_EQ(e.row(), 1);
    }
}

TEST(ParseLevel, UnknownSymbolReportsPosition) {
    try {
        tr::parse_level("X{X\nX?X\nX}X", game("cave"));
        FAIL() << "expected a LevelError";
    } catch (const tr::LevelError& e) {
        EXPECT_EQ(e.kind(), tr::LevelErrorKind::UnknownSymbol);
        EXPECT_EQ(e.row(), 1);
        EXPECT_EQ(e.col(), 1);
    }
}

TEST(ParseLevel, MarkerCounts) {
    const auto& cave = game("cave");
    EXPECT_THROW(tr::parse_level("{{}", cave), tr::LevelError);
    EXPECT_THROW(tr::parse_level("{--", cave), tr::LevelError);
    EXPECT_THROW(tr::parse_level("", cave), tr::LevelError);
    // crates has no goal tile; the player may stand on a slot
    EXPECT_NO_THROW(tr::parse_level("+cX", game("crates")));
    // checks can be skipped for perturbed grids
    EXPECT_NO_THROW(tr::parse_level("{{}", cave, false));
}

TEST(ParseLevel, GeneratedLevelsRoundTrip) {
    const auto& cave = game("cave");
    const auto ps = tr::variant_patterns(cave, "doors");
    for (int i = 0; i < 50; ++i) {
        const auto spec = tr::variant_spec(cave, "doors", tr::Label::Solvable, tr::derive_seed(101, i));
        const auto lvl = tr::generate_level(cave, ps, spec).level;
        ASSERT_EQ(tr::parse_level(tr::serialize_level(lvl), cave), lvl);
    }
}

TEST(Perturbations, CountIsCellsTimesAlternatives) {
    const auto& cave = game("cave");
    const auto lvl = tr::read_level_file(cave.variant("simple").examples.front(), cave);
    ASSERT_EQ(lvl.size(), 256u);
    const auto all = tr::enumerate_radius1(lvl, cave);
    EXPECT_EQ(all.size(), 256u * 7u);  // 1792
    for (const auto& p : all) {
        ASSERT_NE(p.old_symbol, p.new_symbol);
        ASSERT_EQ(tr::hamming_distance(lvl, p.apply(lvl)), 1u);
        ASSERT_EQ(p.revert(p.apply(lvl)), lvl);
    }
    // row-major, then alphabet order within a cell
    EXPECT_EQ(all[0].position, (tr::Pos{0, 0}));
    EXPECT_EQ(all[7].position, (tr::Pos{0, 1}));
}

TEST(Perturbations, SampledModeOnePerCellAndSeeded) {
    const auto& cave = game("cave");
    const auto lvl = tr::read_level_file(cave.variant("simple").examples.front(), cave);
    const auto a = tr::sample_radius1(lvl, cave, 42);
    const auto b = tr::sample_radius1(lvl, cave, 42);
    const auto c = tr::sample_radius1(lvl, cave, 43);
    EXPECT_EQ(a.size(), lvl.size());
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    std::set<std::size_t> cells;
    for (const auto& p : a) cells.insert(lvl.index(p.position));
    EXPECT_EQ(cells.size(), lvl.size());
}

TEST(Level, HammingNeedsEqualShapes) {
    EXPECT_THROW(tr::hamming_distance(grid("cave", {"XX"}), grid("cave", {"X", "X"})), tr::Error);
    EXPECT_EQ(tr::hamming_distance(grid("cave", {"X-", "{}"}), grid("cave", {"XX", "{}"})), 1u);
}

TEST(Level, CellCountMustMatchShape) { EXPECT_THROW(tr::Level(2, 2, "XXX", "cave"), tr::Error); }
