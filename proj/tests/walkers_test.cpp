#include "support.hpp"

#include <tilerobust/mechanics.hpp>

#include <gtest/gtest.h>

namespace tr = tilerobust;
using testsupport::game;
using testsupport::grid;

namespace {

tr::Solvability solve(const tr::Level& l) { return tr::check_solvable(l, game(l.game_id())).status; }

void expect_verified(const tr::Level& l) {
    const auto r = tr::check_solvable(l, game(l.game_id()));
    ASSERT_EQ(r.status, tr::Solvability::Solvable);
    ASSERT_TRUE(r.witness);
    const auto v = tr::verify_witness(l, *r.witness, game(l.game_id()));
    EXPECT_TRUE(v.ok()) << tr::verify_code_name(v.code) << " at " << v.step;
}

}  // namespace

TEST(CaveWalk, OpenCorridor) {
    expect_verified(grid("cave", {"{---}"}));
    EXPECT_EQ(solve(grid("cave", {"{-X-}"})), tr::Solvability::Unsolvable);
}

TEST(CaveWalk, NoDiagonalMoves) {
    EXPECT_EQ(solve(grid("cave", {"{X", "X}"})), tr::Solvability::Unsolvable);
}

TEST(CaveWalk, DoorNeedsKey) {
    EXPECT_EQ(solve(grid("cave", {"{-D-}"})), tr::Solvability::Unsolvable);
    expect_verified(grid("cave", {"{KD-}"}));
    // key behind the door does not help
    EXPECT_EQ(solve(grid("cave", {"{-D-}", "XXXXK"})), tr::Solvability::Unsolvable);
}

TEST(CaveWalk, RemovingTheKeyBreaksSolvability) {
    const auto with_key = grid("cave", {"XXXXXXX", "X{-K-XX", "XXXXDXX", "XX}--XX", "XXXXXXX"});
    ASSERT_EQ(solve(with_key), tr::Solvability::Solvable);
    EXPECT_EQ(solve(with_key.with({1, 3}, '-')), tr::Solvability::Unsolvable);
}

TEST(CaveWalk, ConsumingKeysOpenOneDoorEach) {
    tr::GameDef consuming = game("cave");
    consuming.movement.consume_keys = true;
    const auto lvl = grid("cave", {"{KDD}"});
    EXPECT_EQ(tr::check_solvable(lvl, game("cave")).status, tr::Solvability::Solvable);
    EXPECT_EQ(tr::check_solvable(lvl, consuming).status, tr::Solvability::Unsolvable);
    const auto two_keys = grid("cave", {"{KKDD}"});
    const auto r = tr::check_solvable(two_keys, consuming);
    ASSERT_EQ(r.status, tr::Solvability::Solvable);
    EXPECT_TRUE(tr::verify_witness(two_keys, *r.witness, consuming).ok());
}

TEST(CaveWalk, PortalsHopBetweenPartners) {
    const auto lvl = grid("cave", {"{-PXQ-}"});
    expect_verified(lvl);
    const auto r = tr::check_solvable(lvl, game("cave"));
    // the hop itself is not an edge: {->-, -->P, Q->-, -->}
    EXPECT_EQ(r.witness->edges.size(), 4u);
    EXPECT_EQ(solve(grid("cave", {"{-PX--}"})), tr::Solvability::Unsolvable);
    // hops run both ways
    expect_verified(grid("cave", {"}-PXQ-{"}));
}

TEST(CaveWalk, MarkerInvariantBrokenGrids) {
    EXPECT_EQ(solve(grid("cave", {"--}"})), tr::Solvability::Unsolvable);
    EXPECT_EQ(solve(grid("cave", {"{--"})), tr::Solvability::Unsolvable);
    // any start reaching any goal is enough
    EXPECT_EQ(solve(grid("cave", {"{X{-}"})), tr::Solvability::Solvable);
}

TEST(CaveWalk, SymbolOutsideAlphabetThrows) {
    EXPECT_THROW(tr::check_solvable(grid("cave", {"{c}"}), game("cave")), tr::Error);
}

TEST(CaveWalk, ExamplesAreSolvable) {
    const auto& cave = game("cave");
    for (const auto& [name, v] : cave.variants)
        for (const auto& path : v.examples) expect_verified(tr::read_level_file(path, cave));
}

TEST(EdgePathVerify, RejectsTamperedPaths) {
    const auto lvl = grid("cave", {"{---}"});
    const auto& cave = game("cave");
    auto w = *tr::check_solvable(lvl, cave).witness;
    ASSERT_EQ(w.edges.size(), 4u);

    auto dropped = w;
    dropped.edges.erase(dropped.edges.begin() + 1);
    EXPECT_EQ(tr::verify_witness(lvl, dropped, cave).code, tr::VerifyCode::Discontinuity);

    auto truncated = w;
    truncated.edges.pop_back();
    EXPECT_EQ(tr::verify_witness(lvl, truncated, cave).code, tr::VerifyCode::GoalNotReached);

    auto shifted = w;
    shifted.edges.erase(shifted.edges.begin());
    EXPECT_EQ(tr::verify_witness(lvl, shifted, cave).code, tr::VerifyCode::BadStart);

    auto jump = w;
    jump.edges[1].to = {0, 3};
    EXPECT_EQ(tr::verify_witness(lvl, jump, cave).code, tr::VerifyCode::IllegalMove);

    EXPECT_EQ(tr::verify_witness(lvl, tr::SolutionWitness::path({}), cave).code, tr::VerifyCode::Empty);
    EXPECT_EQ(tr::verify_witness(lvl, tr::SolutionWitness::playthrough({lvl}), cave).code,
              tr::VerifyCode::KindMismatch);
}

TEST(EdgePathVerify, TextRoundTrip) {
    const auto lvl = grid("cave", {"{-PXQ-}"});
    const auto w = *tr::check_solvable(lvl, game("cave")).witness;
    const auto text = tr::encode_witness(w);
    EXPECT_EQ(text.substr(0, 11), "0,0 -> 0,1\n");
    const auto back = tr::decode_witness(text, tr::SolutionWitness::Kind::EdgePath, game("cave"));
    EXPECT_EQ(back.edges, w.edges);
    EXPECT_THROW(tr::decode_edge_path("0,0 => 0,1\n"), tr::Error);
}

// --- platform ---------------------------------------------------------------

TEST(Platformer, WalksAndJumpsGaps) {
    // a 3-wide gap is within reach, a 4-wide gap is not
    expect_verified(
        grid("platform", {"--------", "--------", "--------", "--------", "-{---}--", "XX---XXX", "XX---XXX"}));
    EXPECT_EQ(solve(grid("platform",
                         {"---------", "---------", "---------", "---------", "-{----}--", "XX----XXX", "XX----XXX"})),
              tr::Solvability::Unsolvable);
}

TEST(Platformer, JumpHeightLimit) {
    // wall of height 4 can be topped, height 5 cannot
    const std::vector<std::string> low{"------", "------", "--X---", "--X---", "--X---", "{-X-}-", "XXXXXX"};
    const std::vector<std::string> high{"------", "--X---", "--X---", "--X---", "--X---", "{-X-}-", "XXXXXX"};
    expect_verified(grid("platform", low));
    EXPECT_EQ(solve(grid("platform", high)), tr::Solvability::Unsolvable);
}

TEST(Platformer, FallingOutOfTheLevelIsDeath) {
    EXPECT_EQ(solve(grid("platform", {"{--", "---", "--}", "--X"})), tr::Solvability::Unsolvable);
    // falling onto the goal counts
    EXPECT_EQ(solve(grid("platform", {"{--", "X--", "-}-", "--X"})), tr::Solvability::Solvable);
}

TEST(Platformer, NoWallClimbing) {
    const std::vector<std::string> shaft{"X}--X", "X---X", "X---X", "X---X", "X---X", "X---X", "X{--X", "XXXXX"};
    EXPECT_EQ(solve(grid("platform", shaft)), tr::Solvability::Unsolvable);
    expect_verified(grid("vertical", shaft));
}

TEST(Platformer, ExamplesAreSolvable) {
    const auto& p = game("platform");
    for (const auto& path : p.variant("standard").examples) expect_verified(tr::read_level_file(path, p));
}

// --- vertical -----------------------------------------------------------------

TEST(Climber, WallJumpCrossesShaft) {
    // the goal sits on the far wall; only a diagonal push-off reaches it
    const std::vector<std::string> lvl{"X---X", "X---X", "X--}X", "X---X", "X{--X", "XX-XX", "XXXXX"};
    expect_verified(grid("vertical", lvl));
}

TEST(Climber, LedgeLeapClearsAHole) {
    // the leap lands on the goal in one move; without it the climber has to
    // drop into the hole, cling and wall-jump out
    const auto lvl = grid("vertical", {"{-}", "X-X"});
    const auto leap = tr::check_solvable(lvl, game("vertical"));
    ASSERT_TRUE(leap.witness);
    EXPECT_EQ(leap.witness->edges, (std::vector<tr::Edge>{{{0, 0}, {0, 2}}}));
    auto short_leap = game("vertical");
    short_leap.movement.leap_length = 1;
    const auto no_leap = tr::check_solvable(lvl, short_leap);
    ASSERT_TRUE(no_leap.witness);
    EXPECT_EQ(no_leap.witness->edges.size(), 2u);
    EXPECT_TRUE(tr::verify_witness(lvl, *no_leap.witness, short_leap).ok());
    // the same hole is fatal without wall clinging
    EXPECT_EQ(tr::check_solvable(lvl.with({0, 0}, '{'), game("platform")).status, tr::Solvability::Unsolvable);
}

TEST(CaveWalk, ChainedPortalHopsVerify) {
    // P -> Q -> P without a step in between
    const auto lvl = grid("cave", {"{PXQXP}"});
    const auto r = tr::check_solvable(lvl, game("cave"));
    ASSERT_TRUE(r.witness);
    EXPECT_EQ(r.witness->edges, (std::vector<tr::Edge>{{{0, 0}, {0, 1}}, {{0, 5}, {0, 6}}}));
    EXPECT_TRUE(tr::verify_witness(lvl, *r.witness, game("cave")).ok());
}

TEST(Climber, DecorVariantsDoNotChangeSolvability) {
    const auto& v = game("vertical");
    int decorated = 0;
    for (const auto& path : v.variant("standard").examples) {
        const auto lvl = tr::read_level_file(path, v);
        std::string plain = lvl.cells();
        for (char& c : plain)
            if (c == 'F' || c == 'I') c = 'X';
        const tr::Level undecorated(lvl.rows(), lvl.cols(), plain, lvl.game_id());
        decorated += undecorated != lvl;
        const auto a = tr::check_solvable(lvl, v);
        const auto b = tr::check_solvable(undecorated, v);
        EXPECT_EQ(a.status, b.status);
        ASSERT_TRUE(a.witness);
        EXPECT_TRUE(tr::verify_witness(undecorated, *a.witness, v).ok());
    }
    EXPECT_GT(decorated, 0);
}

TEST(Climber, ExamplesAreSolvable) {
    const auto& v = game("vertical");
    for (const auto& path : v.variant("standard").examples) expect_verified(tr::read_level_file(path, v));
}

// --- oracle agreement (small sample; the acceptance suite runs 500) ----------

TEST(CaveWalk, AgreesWithFixpointOracle) {
    tr::CounterRng rng(2024);
    for (int i = 0; i < 150; ++i) {
        const auto lvl = testsupport::random_cave(rng, i % 3);
        const bool expect = testsupport::cave_reachable(lvl);
        const auto r = tr::check_solvable(lvl, game("cave"));
        ASSERT_EQ(r.solvable(), expect) << tr::serialize_level(lvl);
        if (expect) {
            ASSERT_TRUE(tr::verify_witness(lvl, *r.witness, game("cave")).ok());
        }
    }
}
