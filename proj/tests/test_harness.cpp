#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "oracles.hpp"
#include "uso/harness.hpp"

using uso::AdversaryId;
using uso::DuelConfig;
using uso::SolverId;

TEST(Parse, SolverAndAdversaryNames) {
    for (SolverId id : {SolverId::JumpAntipodal, SolverId::NaiveRecover, SolverId::RealizableLog2, SolverId::Random}) {
        EXPECT_EQ(uso::parse_solver(uso::to_string(id)), id);
    }
    EXPECT_EQ(uso::parse_adversary("general"), AdversaryId::General);
    EXPECT_EQ(uso::parse_adversary("goodpaths-adversary"), AdversaryId::GoodPaths);
    EXPECT_EQ(uso::parse_adversary("none"), AdversaryId::None);
    EXPECT_THROW(uso::parse_solver("simplex"), uso::UsageError);
    EXPECT_THROW(uso::parse_adversary("evil"), uso::UsageError);
}

TEST(Seeds, DerivedSeedsAreDeterministicAndSpread) {
    EXPECT_EQ(uso::derive_seed(1, 2, 3), uso::derive_seed(1, 2, 3));
    EXPECT_NE(uso::derive_seed(1, 2, 3), uso::derive_seed(1, 2, 4));
    EXPECT_NE(uso::derive_seed(1, 2, 3), uso::derive_seed(2, 2, 3));
}

TEST(GeneralDuel, SolversMeetLowerBound) {
    for (std::size_t n = 2; n <= 8; ++n) {
        for (SolverId s : {SolverId::NaiveRecover, SolverId::JumpAntipodal}) {
            const auto r = uso::run_duel({n, s, AdversaryId::General, n});
            EXPECT_TRUE(r.passed()) << n << ' ' << uso::to_string(s);
            ASSERT_TRUE(r.answer.has_value());
            EXPECT_TRUE(r.answer_correct);
            EXPECT_GE(r.queries, n - 1);
            EXPECT_EQ(r.lower_bound, n - 1);
            EXPECT_EQ(r.audits_run, r.queries + 1);
            EXPECT_TRUE(oracle::legal_by_permutation(oracle::plain(r.final_matrix)));
            const auto sol = oracle::all_solutions(oracle::plain(r.final_matrix), std::vector<int>(n, 1));
            ASSERT_EQ(sol.size(), 1u);
            EXPECT_EQ(sol.front(), oracle::plain(*r.answer));
        }
    }
}

TEST(GeneralDuel, RandomStrategiesPassAudits) {
    for (std::size_t n = 2; n <= 8; ++n) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto r = uso::run_duel({n, SolverId::Random, AdversaryId::General, seed});
            EXPECT_TRUE(r.audits_passed());
            EXPECT_FALSE(r.answer.has_value());
            EXPECT_GE(r.queries, n - 1);
        }
    }
}

TEST(GeneralDuel, RealizableSolverRejected) {
    EXPECT_THROW(uso::run_duel({4, SolverId::RealizableLog2, AdversaryId::General, 0}), uso::UsageError);
    EXPECT_THROW(uso::run_duel({4, SolverId::NaiveRecover, AdversaryId::None, 0}), uso::UsageError);
}

TEST(GoodPathsDuel, EverySolverSettlesNoEarlierThanFloorLog) {
    for (std::size_t n : {4u, 16u, 64u}) {
        for (SolverId s : {SolverId::RealizableLog2, SolverId::NaiveRecover, SolverId::JumpAntipodal, SolverId::Random}) {
            const auto r = uso::run_duel({n, s, AdversaryId::GoodPaths, 7});
            EXPECT_TRUE(r.audits_passed()) << n << ' ' << uso::to_string(s);
            ASSERT_TRUE(r.settled_after.has_value());
            EXPECT_GE(*r.settled_after, oracle::floor_log2(n));
            EXPECT_TRUE(r.bound_respected());
        }
    }
}

TEST(DuelJson, CarriesTranscriptAndVerdict) {
    const auto r = uso::run_duel({5, SolverId::NaiveRecover, AdversaryId::General, 3});
    const auto j = uso::to_json(r);
    EXPECT_EQ(j.at("verdict"), "pass");
    EXPECT_EQ(j.at("transcript").size(), r.queries);
    EXPECT_EQ(j.at("final_matrix").size(), 5u);
    EXPECT_EQ(j.at("lower_bound"), 4);
    // Same seed, same duel.
    EXPECT_EQ(uso::to_json(uso::run_duel({5, SolverId::NaiveRecover, AdversaryId::General, 3})), j);
}

TEST(Bench, RowsRespectBoundsAndAreSorted) {
    uso::BenchConfig cfg;
    cfg.solver = SolverId::JumpAntipodal;
    cfg.ns = {6, 2, 4};
    cfg.trials = 5;
    const auto rows = uso::run_bench(cfg);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].n, 2u);
    EXPECT_EQ(rows[2].n, 6u);
    for (const auto& r : rows) {
        EXPECT_EQ(r.instance_class, "general");
        EXPECT_LE(r.min_queries, r.max_queries);
        EXPECT_LE(r.max_queries, r.n);
        EXPECT_TRUE(r.bound_respected);
        EXPECT_TRUE(r.verified);
    }
}

TEST(Bench, RealizableAndAdversaryClasses) {
    uso::BenchConfig cfg;
    cfg.solver = SolverId::RealizableLog2;
    cfg.realizable = true;
    cfg.ns = {64};
    cfg.trials = 3;
    const auto rows = uso::run_bench(cfg);
    EXPECT_EQ(rows[0].bound, 1u + 6 + 36);
    EXPECT_TRUE(rows[0].bound_respected);
    EXPECT_TRUE(rows[0].verified);

    cfg.adversary = AdversaryId::GoodPaths;
    const auto adv = uso::run_bench(cfg);
    EXPECT_EQ(adv[0].instance_class, "adversary:goodpaths");
    EXPECT_TRUE(adv[0].verified);
}

TEST(Bench, UsageErrors) {
    uso::BenchConfig cfg;
    cfg.solver = SolverId::RealizableLog2;
    cfg.ns = {4};
    EXPECT_THROW(uso::run_bench(cfg), uso::UsageError);
    cfg.solver = SolverId::Random;
    EXPECT_THROW(uso::run_bench(cfg), uso::UsageError);
    cfg.solver = SolverId::JumpAntipodal;
    cfg.trials = 0;
    EXPECT_THROW(uso::run_bench(cfg), uso::UsageError);
    cfg.trials = 1;
    cfg.ns = {};
    EXPECT_TRUE(uso::run_bench(cfg).empty());
}

TEST(Verify, ExhaustiveSmallDimensions) {
    const std::vector<std::size_t> instances{2, 12, 200, 8688};
    const std::vector<std::size_t> realizable{2, 12, 128, 2000};
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto rep = uso::verify_exhaustive(n);
        EXPECT_TRUE(rep.ok());
        EXPECT_EQ(rep.instances, instances[n - 1]);
        EXPECT_EQ(rep.realizable, realizable[n - 1]);
    }
    EXPECT_THROW(uso::verify_exhaustive(5), uso::UsageError);
}

TEST(Verify, IllegalMatrixLocatesFailure) {
    uso::InstanceFile f{3, uso::BitMatrix::parse(std::vector<std::string>{"110", "110", "001"}),
                        uso::BitVector::parse("000"), std::nullopt};
    const auto rep = uso::verify_instance(f);
    EXPECT_FALSE(rep.ok());
    bool located = false;
    for (const auto& msg : rep.failures) located = located || msg.find("face") != std::string::npos;
    EXPECT_TRUE(located);
    EXPECT_EQ(rep.failures.front(), "matrix is not a legal dimension influence graph");
}

TEST(Verify, WrongBranchingReported) {
    const auto u = uso::random_instance(5, true, 4);
    auto f = uso::make_instance_file(u, uso::Branching::empty(5));
    if (u.matrix() == uso::BitMatrix::identity(5)) f.branching = uso::Branching({0, 1, 0, 0, 0});
    const auto rep = uso::verify_instance(f);
    ASSERT_EQ(rep.failures.size(), 1u);
    EXPECT_EQ(rep.failures.front(), "stored branching does not generate the matrix");
    EXPECT_THROW(uso::verify_instance(uso::make_instance_file(uso::random_instance(9, false, 1))), uso::UsageError);
}

TEST(Count, MatchesFormulaAndBruteForce) {
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto c = uso::count_instances(n);
        EXPECT_TRUE(c.matches());
        EXPECT_EQ(c.branchings, oracle::all_forests(n).size());
        EXPECT_EQ(c.legal_digs, oracle::all_legal_digs(n).size());
        std::size_t real = 0;
        for (const auto& m : oracle::all_legal_digs(n)) real += oracle::realizable_by_search(m) ? 1 : 0;
        EXPECT_EQ(c.realizable_digs, real);
    }
    EXPECT_EQ(uso::count_instances(3).realizable_usos, 128u);
    EXPECT_EQ(uso::count_instances(3).total_usos, 200u);
    EXPECT_THROW(uso::count_instances(5), uso::UsageError);
}
