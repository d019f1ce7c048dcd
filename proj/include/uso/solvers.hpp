#pragma once

// Sink finders and Mx = y solvers, plus the reductions between the two
// query models.

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uso/gf2.hpp"
#include "uso/influence_graph.hpp"
#include "uso/matousek.hpp"

namespace uso {

/// The oracle behaved in a way no instance of the assumed class can.
class OracleMismatch : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SolveReport {
    BitVector answer;
    std::size_t queries_used = 0;
    Transcript transcript;
};

using SinkFinder = std::function<BitVector(VertexOracle&)>;
using MxySolver = std::function<BitVector(MxyOracle&)>;

namespace detail {
inline Transcript transcript_since(const Transcript& t, std::size_t from) {
    return Transcript(t.begin() + static_cast<std::ptrdiff_t>(from), t.end());
}
}  // namespace detail

/// Runs a sink finder and reports the oracle's count delta.
inline SolveReport run_sink_finder(const SinkFinder& finder, VertexOracle& oracle) {
    const std::size_t before = oracle.query_count();
    BitVector answer = finder(oracle);
    return {std::move(answer), oracle.query_count() - before, detail::transcript_since(oracle.transcript(), before)};
}

inline SolveReport run_mxy_solver(const MxySolver& solver, MxyOracle& oracle) {
    const std::size_t before = oracle.query_count();
    BitVector answer = solver(oracle);
    return {std::move(answer), oracle.query_count() - before, detail::transcript_since(oracle.transcript(), before)};
}

/// Remembers replies so that queries in the span of earlier ones are
/// answered by linearity instead of by the oracle.
class LinearReplyCache {
  public:
    explicit LinearReplyCache(std::size_t n) : span_(n) {}

    void record(const BitVector& q, const BitVector& reply) {
        span_.insert(q);
        replies_.push_back(reply);
    }

    std::optional<BitVector> lookup(const BitVector& q) const {
        const auto combo = span_.express(q);
        if (!combo) return std::nullopt;
        BitVector r(span_.dimension());
        for (std::size_t i : *combo) r ^= replies_[i];
        return r;
    }

    /// Cached reply if available, otherwise one oracle query.
    BitVector ask(MxyOracle& oracle, const BitVector& q) {
        if (auto hit = lookup(q)) return *hit;
        BitVector r = oracle.query(q);
        record(q, r);
        return r;
    }

  private:
    SpanTracker span_;
    std::vector<BitVector> replies_;
};

// ---------------------------------------------------------------------------
// General Matousek-type instances

/// Query v, jump to v xor o(v), repeat. Every jump lands in a facet that
/// is never left again, so after n queries the jump target is the sink.
inline SolveReport jump_antipodal(VertexOracle& oracle, const BitVector& start) {
    const std::size_t n = oracle.dimension();
    if (start.size() != n) throw DimensionMismatch("start vertex length");
    const std::size_t before = oracle.query_count();
    std::vector<BitVector> visited;
    BitVector v = start;
    for (std::size_t step = 0; step < n; ++step) {
        for (const auto& w : visited) {
            if (w == v) throw OracleMismatch("not decomposable");
        }
        const BitVector o = oracle.evaluate(v);
        if (o.none()) break;
        visited.push_back(v);
        v ^= o;
    }
    return {v, oracle.query_count() - before, detail::transcript_since(oracle.transcript(), before)};
}

inline SolveReport jump_antipodal(VertexOracle& oracle) {
    return jump_antipodal(oracle, BitVector::ones(oracle.dimension()));
}

inline SinkFinder jump_antipodal_finder(std::optional<BitVector> start = std::nullopt) {
    return [start](VertexOracle& o) {
        return (start ? jump_antipodal(o, *start) : jump_antipodal(o)).answer;
    };
}

/// Column i of M is the reply to e_i.
inline BitMatrix recover_matrix_naive(MxyOracle& oracle) {
    const std::size_t n = oracle.dimension();
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set_column(i, oracle.query(BitVector::unit(n, i)));
    return m;
}

inline BitVector naive_mxy_solve(MxyOracle& oracle) { return solve(recover_matrix_naive(oracle), oracle.target()); }

// ---------------------------------------------------------------------------
// Realizable instances

/// Levels from ceil(log2 n) queries. Round i queries the vertices whose
/// level has its i lowest bits set; a vertex answers with an odd count of
/// queried strict ancestors exactly when bit i of its level is set.
inline LevelAssignment levelling(MxyOracle& oracle, LinearReplyCache* cache = nullptr) {
    const std::size_t n = oracle.dimension();
    std::vector<std::size_t> lvl(n, 0);
    BitVector q = BitVector::ones(n);
    for (std::size_t i = 0; i < ceil_log2(n); ++i) {
        const BitVector reply = oracle.query(q);
        if (cache) cache->record(q, reply);
        const BitVector r = reply ^ q;
        for (std::size_t v : r.support()) lvl[v] += std::size_t{1} << i;
        q &= r;
    }
    return LevelAssignment(std::move(lvl));
}

/// table[l][v] is the l-ancestor of v, or kNoDim if unknown / nonexistent.
class AncestorTable {
  public:
    AncestorTable() = default;
    AncestorTable(std::size_t levels, std::size_t n) : n_(n), cells_(levels * n, kNoDim) {}

    std::size_t levels() const noexcept { return n_ == 0 ? 0 : cells_.size() / n_; }
    std::size_t size() const noexcept { return n_; }

    Dim at(std::size_t level, Dim v) const { return cells_.at(level * n_ + (v - 1)); }
    Dim& at(std::size_t level, Dim v) { return cells_.at(level * n_ + (v - 1)); }

    /// Parent array read off level lvl[v] - 1.
    Branching to_branching(const LevelAssignment& lvl) const {
        std::vector<Dim> parents(n_, kNoDim);
        for (Dim v = 1; v <= n_; ++v) {
            if (lvl.level(v) > 0) parents[v - 1] = at(lvl.level(v) - 1, v);
        }
        return Branching(std::move(parents));
    }

    bool operator==(const AncestorTable&) const = default;

  private:
    std::size_t n_ = 0;
    std::vector<Dim> cells_;
};

/// Recovers every ancestor from known levels. Each round bisects every open
/// level interval at its median m and learns all m-ancestors of the
/// interval by a binary search over vertex labels; one query per label bit
/// is shared by all intervals. The influence of lower intervals is removed
/// from a reply via the already known ancestor at the lower interval's end.
///
/// Labels are searched by their ceil(log2 n) low bits. When n is a power of
/// two, label n has no low bit set and is identified by elimination.
inline AncestorTable divide_and_conquer(MxyOracle& oracle, const LevelAssignment& lvl,
                                        LinearReplyCache* cache = nullptr) {
    const std::size_t n = oracle.dimension();
    if (lvl.size() != n) throw DimensionMismatch("level assignment length");
    const std::size_t max_level = lvl.max_level();
    AncestorTable table(max_level, n);
    if (max_level == 0) return table;

    const std::size_t bits = ceil_log2(n);
    const std::size_t code_mask = (std::size_t{1} << bits) - 1;
    const bool zero_code_label = (std::size_t{1} << bits) == n;
    const auto by_level = lvl.by_level();

    LinearReplyCache local(n);
    LinearReplyCache& replies = cache ? *cache : local;
    auto ask = [&](const BitVector& q) { return q.none() ? BitVector(n) : replies.ask(oracle, q); };
    auto inconsistent = [] { return OracleMismatch("inconsistent instance"); };

    struct Interval {
        std::size_t lo;
        std::size_t hi;
        std::size_t median() const { return (lo + hi) / 2; }
    };
    std::vector<Interval> open{{0, max_level}};

    while (!open.empty()) {
        for (std::size_t s = 0; s < bits; ++s) {
            BitVector q(n);
            for (const auto& iv : open) {
                for (Dim v : by_level[iv.median()]) {
                    if ((v & code_mask) >> s & 1U) q.set(v - 1);
                }
            }
            BitVector r = ask(q);
            for (const auto& iv : open) {
                for (std::size_t l = iv.hi + 1; l <= max_level; ++l) {
                    for (Dim v : by_level[l]) {
                        const Dim a = table.at(iv.hi, v);
                        if (a == kNoDim) throw inconsistent();
                        if (r[a - 1]) r.flip(v - 1);
                    }
                }
                for (std::size_t l = iv.median() + 1; l <= iv.hi; ++l) {
                    for (Dim v : by_level[l]) {
                        if (r[v - 1]) table.at(iv.median(), v) += std::size_t{1} << s;
                    }
                }
            }
        }

        for (const auto& iv : open) {
            const std::size_t m = iv.median();
            for (std::size_t l = m + 1; l <= iv.hi; ++l) {
                for (Dim v : by_level[l]) {
                    Dim& a = table.at(m, v);
                    if (a == kNoDim) {
                        if (!zero_code_label) throw inconsistent();
                        a = n;
                    }
                    if (a > n || lvl.level(a) != m) throw inconsistent();
                }
            }
        }
        // Vertices below an interval inherit its median ancestor through
        // their ancestor at the interval's last level.
        for (const auto& iv : open) {
            const std::size_t m = iv.median();
            for (std::size_t l = iv.hi + 1; l <= max_level; ++l) {
                for (Dim v : by_level[l]) table.at(m, v) = table.at(m, table.at(iv.hi, v));
            }
        }

        std::vector<Interval> next;
        for (const auto& iv : open) {
            const std::size_t m = iv.median();
            if (m > iv.lo) next.push_back({iv.lo, m});
            if (iv.hi > m + 1) next.push_back({m + 1, iv.hi});
        }
        open = std::move(next);
    }
    return table;
}

/// Recovers M by levelling plus divide and conquer, then solves Mx = y by
/// elimination. Throws OracleMismatch if the replies contradict the
/// recovered matrix. Some non-realizable matrices answer every query like a
/// realizable one; those go undetected and may yield a wrong x.
inline BitVector realizable_mxy_solve(MxyOracle& oracle) {
    const std::size_t n = oracle.dimension();
    const std::size_t before = oracle.query_count();
    LinearReplyCache cache(n);
    try {
        const LevelAssignment lvl = levelling(oracle, &cache);
        const AncestorTable table = divide_and_conquer(oracle, lvl, &cache);
        const DimensionInfluenceGraph g = closure_of_branching(table.to_branching(lvl));
        const auto& log = oracle.transcript();
        for (std::size_t i = before; i < log.size(); ++i) {
            if (mat_vec_mul(g.adjacency(), log[i].query) != log[i].reply) throw OracleMismatch("reply mismatch");
        }
        return solve(g.adjacency(), oracle.target());
    } catch (const std::invalid_argument&) {
        throw OracleMismatch("oracle not realizable Matousek-type");
    } catch (const std::out_of_range&) {
        throw OracleMismatch("oracle not realizable Matousek-type");
    } catch (const OracleMismatch&) {
        throw OracleMismatch("oracle not realizable Matousek-type");
    }
}

// ---------------------------------------------------------------------------
// Reductions between the query models

/// Matrix-vector replies simulated from vertex evaluations:
/// Mq = u(anchor) xor u(anchor xor q).
class VertexBackedMxyOracle final : public MxyOracle {
  public:
    VertexBackedMxyOracle(VertexOracle& vertices, BitVector anchor)
        : vertices_(vertices), anchor_(std::move(anchor)), y_(vertices_.evaluate(anchor_)) {}

    std::size_t dimension() const override { return vertices_.dimension(); }
    const BitVector& target() const override { return y_; }

  protected:
    BitVector answer(const BitVector& q) override { return y_ ^ vertices_.evaluate(anchor_ ^ q); }

  private:
    VertexOracle& vertices_;
    BitVector anchor_;
    BitVector y_;
};

/// Vertex evaluations simulated from matrix-vector queries. The first
/// vertex asked becomes v0 and is answered with y for free; any later
/// vertex v costs one query: u(v) = y xor M(v xor v0).
class MxyBackedVertexOracle final : public VertexOracle {
  public:
    explicit MxyBackedVertexOracle(MxyOracle& mxy) : mxy_(mxy) {}

    std::size_t dimension() const override { return mxy_.dimension(); }
    const std::optional<BitVector>& first_vertex() const noexcept { return v0_; }

  protected:
    BitVector compute_outmap(const BitVector& v) override {
        if (!v0_) {
            v0_ = v;
            return mxy_.target();
        }
        return mxy_.target() ^ mxy_.query(v ^ *v0_);
    }

  private:
    MxyOracle& mxy_;
    std::optional<BitVector> v0_;
};

/// One extra vertex evaluation (the anchor 0) on top of the wrapped solver.
inline SinkFinder sink_finder_from_mxy_solver(MxySolver solver) {
    return [solver = std::move(solver)](VertexOracle& vertices) {
        VertexBackedMxyOracle simulated(vertices, BitVector(vertices.dimension()));
        return solver(simulated);
    };
}

/// One query fewer than the wrapped sink finder; x = sink xor v0.
inline MxySolver mxy_solver_from_sink_finder(SinkFinder finder) {
    return [finder = std::move(finder)](MxyOracle& mxy) {
        MxyBackedVertexOracle simulated(mxy);
        const BitVector sink = finder(simulated);
        return sink ^ simulated.first_vertex().value_or(BitVector(mxy.dimension()));
    };
}

/// Sink of a realizable Matousek-type USO in at most
/// 1 + ceil(log2 n) + ceil(log2 n) * ceil(log2(l_max + 1)) evaluations.
inline SolveReport solve_realizable_sink(VertexOracle& oracle) {
    return run_sink_finder(sink_finder_from_mxy_solver(realizable_mxy_solve), oracle);
}

inline std::size_t realizable_query_bound(std::size_t n) {
    const std::size_t k = ceil_log2(n);
    return 1 + k + k * k;
}

}  // namespace uso
