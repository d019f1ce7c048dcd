#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "uso/solvers.hpp"

using uso::BitMatrix;
using uso::BitVector;
using uso::Branching;
using uso::MatousekUso;

namespace {

BitMatrix parse_rows(std::vector<std::string> rows) { return BitMatrix::parse(rows); }

BitMatrix closure(std::vector<uso::Dim> parents) {
    return uso::closure_of_branching(Branching(std::move(parents))).adjacency();
}

/// Nonzero queries of a transcript are linearly independent.
bool nonzero_queries_independent(const uso::Transcript& t) {
    std::vector<oracle::Vec> seen;
    for (const auto& rec : t) {
        if (rec.query.none()) continue;
        const oracle::Vec q = oracle::plain(rec.query);
        if (oracle::in_span(seen, q)) return false;
        seen.push_back(q);
    }
    return true;
}

std::size_t dc_bound(std::size_t n, std::size_t max_level) {
    return oracle::ceil_log2(n) * oracle::ceil_log2(max_level + 1);
}

}  // namespace

TEST(JumpAntipodal, StartAtSink) {
    const MatousekUso u = uso::random_instance(6, false, 1);
    uso::UsoVertexOracle oracle(u);
    const auto rep = uso::jump_antipodal(oracle, u.sink());
    EXPECT_EQ(rep.answer, u.sink());
    EXPECT_EQ(rep.queries_used, 1u);
}

TEST(JumpAntipodal, IdentityTrace) {
    uso::UsoVertexOracle oracle(MatousekUso(BitMatrix::identity(2), BitVector(2)));
    const auto rep = uso::jump_antipodal(oracle, BitVector::parse("11"));
    EXPECT_EQ(rep.answer.to_string(), "00");
    ASSERT_EQ(rep.transcript.size(), 2u);
    EXPECT_EQ(rep.transcript[0].query.to_string(), "11");
    EXPECT_EQ(rep.transcript[0].reply.to_string(), "11");
    EXPECT_EQ(rep.transcript[1].query.to_string(), "00");
    EXPECT_TRUE(rep.transcript[1].reply.none());
}

TEST(JumpAntipodal, LowerTriangularTrace) {
    uso::UsoVertexOracle oracle(MatousekUso(parse_rows({"10", "11"}), BitVector(2)));
    const auto rep = uso::jump_antipodal(oracle, BitVector::parse("11"));
    ASSERT_EQ(rep.transcript.size(), 2u);
    EXPECT_EQ(rep.transcript[0].reply.to_string(), "10");
    EXPECT_EQ(rep.transcript[1].query.to_string(), "01");
    EXPECT_EQ(rep.transcript[1].reply.to_string(), "01");
    // Two queries used, the final target is not queried.
    EXPECT_EQ(rep.answer.to_string(), "00");
    EXPECT_EQ(rep.queries_used, 2u);
}

TEST(JumpAntipodal, DefaultStartIsAllOnes) {
    uso::UsoVertexOracle oracle(MatousekUso(BitMatrix::identity(3), BitVector(3)));
    uso::jump_antipodal(oracle);
    EXPECT_EQ(oracle.transcript().front().query, BitVector::ones(3));
}

TEST(JumpAntipodal, EveryInstanceAndStartUpToFour) {
    for (std::size_t n = 1; n <= 4; ++n) {
        for (const auto& g : uso::enumerate_legal_digs(n)) {
            for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
                const MatousekUso u(g, BitVector::from_integer(n, s));
                const auto sinks = oracle::sinks(oracle::plain(u.matrix()), oracle::plain(u.sink()));
                for (std::uint64_t v0 = 0; v0 < (std::uint64_t{1} << n); ++v0) {
                    uso::UsoVertexOracle o(u);
                    const auto rep = uso::jump_antipodal(o, BitVector::from_integer(n, v0));
                    ASSERT_EQ(oracle::plain(rep.answer), sinks.front());
                    ASSERT_LE(o.query_count(), n);
                    ASSERT_EQ(rep.queries_used, o.query_count());
                }
            }
        }
    }
}

TEST(JumpAntipodal, RandomUpToTen) {
    for (std::size_t n = 5; n <= 10; ++n) {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const MatousekUso u = uso::random_instance(n, seed % 2 == 0, seed * 31 + n);
            uso::UsoVertexOracle o(u);
            const auto rep = uso::jump_antipodal(o);
            EXPECT_TRUE(u.outmap(rep.answer).none());
            EXPECT_LE(o.query_count(), n);
        }
    }
}

TEST(JumpAntipodal, RevisitMeansNotDecomposable) {
    // 000 -> 001 -> 000 is a jump cycle.
    std::vector<std::uint64_t> table(8, 0b111);
    table[0b000] = 0b001;
    table[0b001] = 0b001;
    uso::TableVertexOracle o(3, table);
    try {
        uso::jump_antipodal(o, BitVector(3));
        FAIL();
    } catch (const uso::OracleMismatch& e) {
        EXPECT_STREQ(e.what(), "not decomposable");
    }
    EXPECT_THROW(uso::jump_antipodal(o, BitVector(2)), uso::DimensionMismatch);
}

TEST(RecoverMatrixNaive, Examples) {
    uso::MatrixMxyOracle id(BitMatrix::identity(3), BitVector::ones(3));
    EXPECT_EQ(uso::recover_matrix_naive(id), BitMatrix::identity(3));
    EXPECT_EQ(id.query_count(), 3u);
    const BitMatrix path = closure({0, 1, 2});
    uso::MatrixMxyOracle p(path, BitVector::ones(3));
    EXPECT_EQ(uso::recover_matrix_naive(p), path);
    EXPECT_EQ(p.query_count(), 3u);
    uso::MatrixMxyOracle one(BitMatrix::identity(1), BitVector::ones(1));
    EXPECT_EQ(uso::recover_matrix_naive(one), BitMatrix::identity(1));
    EXPECT_EQ(one.query_count(), 1u);
}

TEST(RecoverMatrixNaive, ColumnsAreUnitReplies) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t n = 1 + seed % 17;
        const BitMatrix m = uso::random_legal_dig(n, seed).adjacency();
        uso::MatrixMxyOracle o(m, BitVector::ones(n));
        const BitMatrix got = uso::recover_matrix_naive(o);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_EQ(oracle::plain(got.column(i)), oracle::mul(oracle::plain(m), oracle::plain(BitVector::unit(n, i))));
        }
        EXPECT_EQ(o.query_count(), n);
        EXPECT_TRUE(nonzero_queries_independent(o.transcript()));
        const BitVector x = uso::naive_mxy_solve(o);
        EXPECT_EQ(uso::mat_vec_mul(m, x), BitVector::ones(n));
    }
}

TEST(LinearReplyCache, DependentQueriesAreFree) {
    const BitMatrix m = uso::random_legal_dig(6, 4).adjacency();
    uso::MatrixMxyOracle o(m, BitVector::ones(6));
    uso::LinearReplyCache cache(6);
    const BitVector a = BitVector::parse("110000");
    const BitVector b = BitVector::parse("011010");
    cache.ask(o, a);
    cache.ask(o, b);
    EXPECT_EQ(o.query_count(), 2u);
    EXPECT_EQ(cache.ask(o, a ^ b), uso::mat_vec_mul(m, a ^ b));
    EXPECT_EQ(cache.ask(o, BitVector(6)), BitVector(6));
    EXPECT_EQ(o.query_count(), 2u);
    EXPECT_FALSE(cache.lookup(BitVector::parse("000001")).has_value());
}

TEST(Levelling, Examples) {
    uso::MatrixMxyOracle one(BitMatrix::identity(1), BitVector::ones(1));
    EXPECT_EQ(uso::levelling(one).values(), (std::vector<std::size_t>{0}));
    EXPECT_EQ(one.query_count(), 0u);

    uso::MatrixMxyOracle path(closure({0, 1}), BitVector::ones(2));
    EXPECT_EQ(uso::levelling(path).values(), (std::vector<std::size_t>{0, 1}));
    ASSERT_EQ(path.query_count(), 1u);
    EXPECT_EQ(path.transcript()[0].query.to_string(), "11");
    EXPECT_EQ(path.transcript()[0].reply.to_string(), "10");

    uso::MatrixMxyOracle id(BitMatrix::identity(4), BitVector::ones(4));
    EXPECT_EQ(uso::levelling(id).values(), (std::vector<std::size_t>(4, 0)));
    EXPECT_EQ(id.query_count(), 2u);
}

TEST(Levelling, EveryBranchingUpToSix) {
    for (std::size_t n = 1; n <= 6; ++n) {
        for (const auto& p : oracle::all_forests(n)) {
            uso::MatrixMxyOracle o(oracle::packed(oracle::closure(p), n), BitVector::ones(n));
            ASSERT_EQ(uso::levelling(o).values(), oracle::depths(p));
            ASSERT_EQ(o.query_count(), oracle::ceil_log2(n));
            ASSERT_TRUE(nonzero_queries_independent(o.transcript()));
        }
    }
}

TEST(DivideAndConquer, Examples) {
    uso::MatrixMxyOracle id(BitMatrix::identity(3), BitVector::ones(3));
    const auto empty = uso::divide_and_conquer(id, uso::LevelAssignment({0, 0, 0}));
    EXPECT_EQ(empty.levels(), 0u);
    EXPECT_EQ(id.query_count(), 0u);

    uso::MatrixMxyOracle path(closure({0, 1}), BitVector::ones(2));
    const auto t = uso::divide_and_conquer(path, uso::LevelAssignment({0, 1}));
    EXPECT_EQ(t.at(0, 2), 1u);
    EXPECT_EQ(t.at(0, 1), uso::kNoDim);
    ASSERT_EQ(path.query_count(), 1u);
    EXPECT_EQ(path.transcript()[0].query.to_string(), "10");

    uso::MatrixMxyOracle star(closure({0, 1, 1}), BitVector::ones(3));
    const auto s = uso::divide_and_conquer(star, uso::LevelAssignment({0, 1, 1}));
    EXPECT_EQ(s.at(0, 2), 1u);
    EXPECT_EQ(s.at(0, 3), 1u);
    EXPECT_LE(star.query_count(), 2u);
}

TEST(DivideAndConquer, LargestLabelOnPowerOfTwo) {
    // n = 4: label 4 has no low code bit and must be found by elimination.
    uso::MatrixMxyOracle o(closure({4, 0, 1, 0}), BitVector::ones(4));
    const auto lvl = uso::levelling(o);
    EXPECT_EQ(lvl.values(), (std::vector<std::size_t>{1, 0, 2, 0}));
    const auto t = uso::divide_and_conquer(o, lvl);
    EXPECT_EQ(t.to_branching(lvl).parents(), (std::vector<uso::Dim>{4, 0, 1, 0}));
    EXPECT_EQ(t.at(0, 3), 4u);
}

TEST(DivideAndConquer, EveryBranchingUpToSix) {
    for (std::size_t n = 1; n <= 6; ++n) {
        for (const auto& p : oracle::all_forests(n)) {
            uso::MatrixMxyOracle o(oracle::packed(oracle::closure(p), n), BitVector::ones(n));
            const uso::LevelAssignment lvl(oracle::depths(p));
            const auto table = uso::divide_and_conquer(o, lvl);
            ASSERT_EQ(table.to_branching(lvl).parents(), (std::vector<uso::Dim>(p.begin(), p.end())));
            ASSERT_LE(o.query_count(), dc_bound(n, lvl.max_level()));
            ASSERT_TRUE(nonzero_queries_independent(o.transcript()));
            // Full table against a parent walk.
            for (std::size_t v = 1; v <= n; ++v) {
                std::size_t a = v;
                for (std::size_t l = lvl.level(v); l-- > 0;) {
                    a = p[a - 1];
                    ASSERT_EQ(table.at(l, v), a);
                }
                for (std::size_t l = lvl.level(v); l < table.levels(); ++l) ASSERT_EQ(table.at(l, v), uso::kNoDim);
            }
        }
    }
}

TEST(DivideAndConquer, RandomLarge) {
    for (std::size_t n : {16u, 64u, 100u, 256u, 1000u, 1024u}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const Branching b = uso::random_branching(n, seed + 1000 * n);
            uso::MatrixMxyOracle o(uso::closure_of_branching(b).adjacency(), BitVector::ones(n));
            const auto lvl = uso::levelling(o);
            const std::size_t level_queries = o.query_count();
            EXPECT_EQ(level_queries, oracle::ceil_log2(n));
            const auto depth = b.depths();
            EXPECT_EQ(lvl.values(), depth);
            const auto table = uso::divide_and_conquer(o, lvl);
            EXPECT_EQ(table.to_branching(lvl), b);
            EXPECT_LE(o.query_count() - level_queries, dc_bound(n, lvl.max_level()));
        }
    }
}

TEST(DivideAndConquer, WrongLevelsAreDetected) {
    uso::MatrixMxyOracle id(BitMatrix::identity(3), BitVector::ones(3));
    try {
        uso::divide_and_conquer(id, uso::LevelAssignment({0, 1, 1}));
        FAIL();
    } catch (const uso::OracleMismatch& e) {
        EXPECT_STREQ(e.what(), "inconsistent instance");
    }
    EXPECT_THROW(uso::divide_and_conquer(id, uso::LevelAssignment({0, 0})), uso::DimensionMismatch);
}

TEST(RealizableMxySolve, RejectsNonRealizable) {
    // 1 -> 2 -> 3 without the edge 1 -> 3: the replies imply level 3 for
    // vertex 3 while level 2 is empty.
    BitMatrix m = BitMatrix::identity(3);
    m.set(1, 0);
    m.set(2, 1);
    uso::MatrixMxyOracle o(m, BitVector::ones(3));
    try {
        uso::realizable_mxy_solve(o);
        FAIL();
    } catch (const uso::OracleMismatch& e) {
        EXPECT_STREQ(e.what(), "oracle not realizable Matousek-type");
    }
}

TEST(RealizableMxySolve, DetectsSomeNonRealizableInputs) {
    // Detection is partial: 3 with in-neighbours 1 and 2 answers 111 -> 111
    // exactly like the identity.
    std::size_t thrown = 0;
    for (std::size_t n = 3; n <= 4; ++n) {
        for (const auto& g : uso::enumerate_legal_digs(n)) {
            if (uso::is_realizable_dig(g.adjacency())) continue;
            for (std::uint64_t y = 0; y < (std::uint64_t{1} << n); ++y) {
                uso::MatrixMxyOracle o(g.adjacency(), BitVector::from_integer(n, y));
                try {
                    uso::realizable_mxy_solve(o);
                } catch (const uso::OracleMismatch&) {
                    ++thrown;
                }
            }
        }
    }
    EXPECT_GT(thrown, 0u);
}

TEST(SolveRealizableSink, Examples) {
    for (std::uint64_t s = 0; s < 16; ++s) {
        uso::UsoVertexOracle o(MatousekUso(BitMatrix::identity(4), BitVector::from_integer(4, s)));
        const auto rep = uso::solve_realizable_sink(o);
        EXPECT_EQ(rep.answer, BitVector::from_integer(4, s));
        EXPECT_EQ(o.query_count(), 3u);
    }
    uso::UsoVertexOracle path(MatousekUso(closure({0, 1}), BitVector::parse("10")));
    const auto rep = uso::solve_realizable_sink(path);
    EXPECT_EQ(rep.answer.to_string(), "10");
    EXPECT_LE(path.query_count(), 3u);
    EXPECT_EQ(uso::realizable_query_bound(1024), 111u);
}

TEST(SolveRealizableSink, EveryRealizableInstanceUpToFour) {
    for (std::size_t n = 1; n <= 4; ++n) {
        for (const auto& b : uso::enumerate_branchings(n)) {
            for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
                const MatousekUso u(uso::closure_of_branching(b), BitVector::from_integer(n, s));
                uso::UsoVertexOracle o(u);
                const auto rep = uso::solve_realizable_sink(o);
                ASSERT_EQ(rep.answer, u.sink());
                ASSERT_LE(o.query_count(), 1 + oracle::ceil_log2(n) * (1 + oracle::ceil_log2(n)));
            }
        }
    }
}

TEST(SolveRealizableSink, RandomUpTo4096) {
    for (std::size_t n : {5u, 33u, 128u, 1024u, 4096u}) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const MatousekUso u = uso::random_instance(n, true, seed + n);
            uso::UsoVertexOracle o(u);
            const auto rep = uso::solve_realizable_sink(o);
            EXPECT_EQ(rep.answer, u.sink());
            EXPECT_TRUE(u.outmap(rep.answer).none());
            EXPECT_LE(o.query_count(), uso::realizable_query_bound(n));
        }
    }
}

TEST(Reductions, NaiveWrappedUsesNPlusOne) {
    for (std::size_t n = 1; n <= 4; ++n) {
        for (const auto& g : uso::enumerate_legal_digs(n)) {
            for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
                const MatousekUso u(g, BitVector::from_integer(n, s));
                uso::UsoVertexOracle o(u);
                const auto rep = uso::run_sink_finder(uso::sink_finder_from_mxy_solver(uso::naive_mxy_solve), o);
                ASSERT_EQ(rep.answer, u.sink());
                ASSERT_EQ(o.query_count(), n + 1);
            }
        }
    }
}

TEST(Reductions, JumpWrappedUsesAtMostNMinusOne) {
    for (std::size_t n = 1; n <= 4; ++n) {
        for (const auto& g : uso::enumerate_legal_digs(n)) {
            for (std::uint64_t y = 0; y < (std::uint64_t{1} << n); ++y) {
                uso::MatrixMxyOracle o(g.adjacency(), BitVector::from_integer(n, y));
                const auto rep = uso::run_mxy_solver(uso::mxy_solver_from_sink_finder(uso::jump_antipodal_finder()), o);
                ASSERT_EQ(uso::mat_vec_mul(g.adjacency(), rep.answer), o.target());
                ASSERT_LE(o.query_count(), n - 1);
            }
        }
    }
}

TEST(Reductions, IdentityInstanceReturnsTarget) {
    uso::MatrixMxyOracle o(BitMatrix::identity(5), BitVector::parse("10110"));
    EXPECT_EQ(uso::mxy_solver_from_sink_finder(uso::jump_antipodal_finder())(o).to_string(), "10110");
}

TEST(Reductions, RoundTripKeepsCountsAndAnswers) {
    const std::vector<uso::MxySolver> solvers{uso::naive_mxy_solve, uso::realizable_mxy_solve};
    std::mt19937_64 rng(40);
    for (const auto& inner : solvers) {
        const auto round_trip = uso::mxy_solver_from_sink_finder(uso::sink_finder_from_mxy_solver(inner));
        for (int t = 0; t < 60; ++t) {
            const std::size_t n = 1 + rng() % 9;
            const BitMatrix m = uso::closure_of_branching(uso::random_branching(n, rng())).adjacency();
            BitVector y(n);
            for (std::size_t i = 0; i < n; ++i) y.set(i, rng() & 1U);
            uso::MatrixMxyOracle direct(m, y);
            uso::MatrixMxyOracle wrapped(m, y);
            const auto a = uso::run_mxy_solver(inner, direct);
            const auto b = uso::run_mxy_solver(round_trip, wrapped);
            EXPECT_EQ(a.answer, b.answer);
            EXPECT_EQ(a.queries_used, b.queries_used);
        }
    }
}

TEST(Reductions, VertexBackedOracleAnchorsAtZero) {
    const MatousekUso u = uso::random_instance(6, false, 3);
    uso::UsoVertexOracle vertices(u);
    uso::VertexBackedMxyOracle mxy(vertices, BitVector(6));
    EXPECT_EQ(vertices.query_count(), 1u);
    EXPECT_EQ(mxy.target(), u.outmap(BitVector(6)));
    const BitVector q = BitVector::parse("011001");
    EXPECT_EQ(mxy.query(q), uso::mat_vec_mul(u.matrix(), q));
    EXPECT_EQ(vertices.query_count(), 2u);
}
