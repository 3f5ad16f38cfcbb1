#include "support.hpp"

#include <tilerobust/patterns.hpp>
#include <tilerobust/robustness.hpp>

#include <gtest/gtest.h>

namespace tr = tilerobust;
using testsupport::game;
using testsupport::grid;

namespace {

std::vector<tr::Level> examples(const std::string& game_id, const std::string& variant) {
    std::vector<tr::Level> out;
    for (const auto& p : game(game_id).variant(variant).examples) out.push_back(tr::read_level_file(p, game(game_id)));
    return out;
}

}  // namespace

TEST(Patterns, ExamplesAreAcceptableUnderTheirOwnModel) {
    for (const auto& id : testsupport::catalog().ids()) {
        for (const auto& [name, v] : game(id).variants) {
            const auto ps = tr::variant_patterns(game(id), name);
            for (const auto& lvl : examples(id, name))
                EXPECT_TRUE(tr::check_acceptable(lvl, ps, game(id)).acceptable) << id << "/" << name;
        }
    }
}

TEST(Patterns, WindowCountOfThreeCaveExamples) {
    auto ex = examples("cave", "simple");
    ex.resize(3);
    const auto ps = tr::extract_patterns(ex, game("cave"), 3);
    // counted by a separate script over the padded, marker-free grids
    EXPECT_EQ(ps.windows.size(), 100u);
    const auto one = tr::extract_patterns({ex.front()}, game("cave"), 3);
    EXPECT_EQ(one.windows.size(), 79u);
}

TEST(Patterns, MarkersShareTheirBaseTileWindows) {
    const auto ps = tr::extract_patterns({grid("cave", {"{--", "---", "--}"})}, game("cave"), 2);
    const auto moved = grid("cave", {"---", "-{-", "}--"});
    EXPECT_TRUE(tr::check_acceptable(moved, ps, game("cave")).acceptable);
}

TEST(Patterns, UnseenSymbolIsRejected) {
    const auto ex = examples("cave", "simple");
    const auto ps = tr::extract_patterns(ex, game("cave"), 3);
    const auto with_door = ex.front().with({5, 5}, 'D');
    const auto res = tr::check_acceptable(with_door, ps, game("cave"));
    EXPECT_FALSE(res.acceptable);
    const bool count_hit = std::any_of(res.violations.begin(), res.violations.end(), [](const tr::Violation& v) {
        return v.kind == tr::Violation::Kind::Count && v.symbol == 'D';
    });
    EXPECT_TRUE(count_hit);
}

TEST(Patterns, ViolationsStayNearTheEdit) {
    const auto ex = examples("cave", "simple");
    const auto ps = tr::extract_patterns(ex, game("cave"), 3, 10.0);
    const auto& base = ex.front();
    ASSERT_TRUE(tr::check_acceptable(base, ps, game("cave")).acceptable);
    tr::CounterRng rng(3);
    for (int t = 0; t < 40; ++t) {
        const tr::Pos p = base.pos(rng.below(base.size()));
        const char s = base.at(p) == 'X' ? '-' : 'X';
        for (const auto& v : tr::check_acceptable(base.with(p, s), ps, game("cave")).violations) {
            ASSERT_EQ(v.kind, tr::Violation::Kind::Window);
            EXPECT_LE(v.origin.row, p.row);
            EXPECT_GT(v.origin.row, p.row - 3);
            EXPECT_LE(v.origin.col, p.col);
            EXPECT_GT(v.origin.col, p.col - 3);
        }
    }
}

TEST(Patterns, MoreExamplesNeverShrinkTheModel) {
    const auto ex = examples("cave", "simple");
    const auto small = tr::extract_patterns({ex[0], ex[1]}, game("cave"), 3);
    const auto large = tr::extract_patterns(ex, game("cave"), 3);
    EXPECT_TRUE(std::includes(large.windows.begin(), large.windows.end(), small.windows.begin(), small.windows.end()));
    for (const auto& lvl : {ex[0], ex[1]}) EXPECT_TRUE(tr::check_acceptable(lvl, large, game("cave")).acceptable);
    for (auto [s, range] : small.counts) {
        EXPECT_LE(large.counts.at(s).first, range.first);
        EXPECT_GE(large.counts.at(s).second, range.second);
    }
}

TEST(Patterns, DecorTilesAreDistinctForLocalStructure) {
    const auto ex = examples("vertical", "standard");
    const auto ps = tr::extract_patterns(ex, game("vertical"), 3);
    // swapping decor back to plain wall changes windows, so some windows must fail
    std::string cells = ex.front().cells();
    for (char& c : cells)
        if (c == 'F' || c == 'I') c = 'X';
    const tr::Level plain(ex.front().rows(), ex.front().cols(), cells, "vertical");
    const auto res = tr::check_acceptable(plain, ps, game("vertical"));
    EXPECT_FALSE(res.acceptable);
    EXPECT_GT(ps.counts.at('F').second, 0.0);
}

TEST(Patterns, CountRangeUsesSlack) {
    const auto lvl = grid("cave", {"{-X", "X-X", "X-}"});
    const auto ps = tr::extract_patterns({lvl}, game("cave"), 2, 0.5);
    EXPECT_NEAR(ps.counts.at('X').first, 4.0 / 9 * 0.5, 1e-12);
    EXPECT_NEAR(ps.counts.at('X').second, 4.0 / 9 * 1.5, 1e-12);
    EXPECT_DOUBLE_EQ(ps.counts.at('D').second, 0.0);
    EXPECT_FALSE(ps.counts.contains('{'));
}

TEST(Patterns, TextRoundTrip) {
    const auto ps = tr::variant_patterns(game("crates"), "standard");
    const auto back = tr::decode_patterns(tr::encode_patterns(ps));
    EXPECT_EQ(back, ps);
    const auto file = testsupport::scratch_dir("patterns") / "crates.pat";
    tr::write_patterns(file, ps);
    EXPECT_EQ(tr::read_patterns(file), ps);
    EXPECT_THROW(tr::decode_patterns("patternset 2\n"), tr::Error);
    EXPECT_THROW(tr::decode_patterns("patternset 1\nk 2\nwindows 1\nXXX\n"), tr::Error);
}

TEST(Patterns, RejectsBadExtractionInput) {
    EXPECT_THROW(tr::extract_patterns({}, game("cave"), 3), tr::Error);
    EXPECT_THROW(tr::extract_patterns({grid("cave", {"{}"})}, game("cave"), 0), tr::Error);
    EXPECT_THROW(tr::extract_patterns({grid("cave", {"{}"})}, game("cave"), 2, 0.2, 'X'), tr::Error);
    EXPECT_THROW(tr::extract_patterns({grid("crates", {"{"})}, game("cave"), 2), tr::Error);
}

TEST(AcceptabilityProbe, MatchesFullCheck) {
    for (const auto& [id, variant] : std::vector<std::pair<std::string, std::string>>{
             {"cave", "doors"}, {"crates", "standard"}, {"vertical", "standard"}}) {
        const auto& g = game(id);
        const auto ps = tr::variant_patterns(g, variant);
        const auto lvl = examples(id, variant).front();
        const tr::AcceptabilityProbe probe(lvl, ps, g);
        EXPECT_EQ(probe.base(), tr::check_acceptable(lvl, ps, g, false).acceptable);
        for (const auto& p : tr::enumerate_radius1(lvl, g))
            ASSERT_EQ(probe.accepts(p.position, p.new_symbol),
                      tr::check_acceptable(p.apply(lvl), ps, g, false).acceptable)
                << id << " at " << p.position.row << "," << p.position.col << " -> " << p.new_symbol;
    }
}
