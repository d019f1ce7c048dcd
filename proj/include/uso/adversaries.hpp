#pragma once

// Adaptive matrix-vector oracles that build M while answering, keeping
// every earlier reply valid and hiding the solution for as long as
// possible:
//
//  * GeneralAdversary keeps M a legal DIG and forces n - 1 queries.
//  * GoodPathsAdversary keeps M the closure of a union of disjoint paths
//    (hence realizable) and forces floor(log2 n) queries.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "uso/gf2.hpp"
#include "uso/influence_graph.hpp"
#include "uso/matousek.hpp"

namespace uso {

// ---------------------------------------------------------------------------
// General adversary

/// Row j of M received z after the k-th accepted query.
struct RowAddition {
    std::size_t query_index;  // 1-based k
    Dim row;
    BitVector z;
};

struct GeneralAdversaryState {
    std::size_t n = 0;
    BitVector y;
    BitMatrix m;
    /// Linearly independent queries answered adversarially, in order.
    std::vector<BitVector> accepted;
    /// Reply given to each accepted query.
    std::vector<BitVector> replies;
    std::vector<RowAddition> changes;

    static GeneralAdversaryState fresh(std::size_t n, BitVector y) {
        if (y.size() != n) throw DimensionMismatch("target length");
        return {n, std::move(y), BitMatrix::identity(n), {}, {}, {}};
    }
    static GeneralAdversaryState fresh(std::size_t n) { return fresh(n, BitVector::ones(n)); }

    std::size_t k() const noexcept { return accepted.size(); }
    /// After n - 1 accepted queries M no longer changes.
    bool frozen() const noexcept { return k() + 1 >= n; }
};

/// Answers x. Queries dependent on accepted ones, and all queries once the
/// state is frozen, are answered from the current matrix without changes.
/// Otherwise, if the new reply would put y in the span of the replies, a
/// vector z orthogonal to all earlier queries (with z . x = 1) is added to
/// the row of a vertex j that currently has no out-edges.
inline BitVector general_adversary_answer(GeneralAdversaryState& st, const BitVector& x) {
    if (x.size() != st.n) throw DimensionMismatch("query length");
    if (st.frozen() || span_contains(st.accepted, x)) return mat_vec_mul(st.m, x);

    st.accepted.push_back(x);
    const std::size_t k = st.k();
    std::vector<BitVector> images;
    images.reserve(k);
    for (const auto& q : st.accepted) images.push_back(mat_vec_mul(st.m, q));

    if (span_contains(images, st.y)) {
        const BitMatrix xs = BitMatrix::from_rows(st.accepted, st.n);
        const auto free = free_variables(xs);
        const BitVector z = solve_underdetermined(xs, BitVector::unit(k, k - 1), free);
        const auto j = std::find_if(free.begin(), free.end(), [&](std::size_t c) {
            return st.m.column(c) == BitVector::unit(st.n, c);
        });
        if (j == free.end()) throw std::logic_error("no free variable is an eigenvector of the current matrix");
        st.m.row_mut(*j) ^= z;
        st.changes.push_back({k, *j + 1, z});
    }
    BitVector reply = mat_vec_mul(st.m, x);
    st.replies.push_back(reply);
    return reply;
}

/// Current matrix is legal, accepted queries are independent, and every
/// recorded reply is reproduced by the current matrix.
inline bool general_adversary_audit(const GeneralAdversaryState& st) {
    if (!is_legal_dig(st.m) || st.replies.size() != st.accepted.size()) return false;
    SpanTracker span(st.n);
    for (std::size_t i = 0; i < st.accepted.size(); ++i) {
        if (!span.insert(st.accepted[i])) return false;
        if (mat_vec_mul(st.m, st.accepted[i]) != st.replies[i]) return false;
    }
    return true;
}

/// (a) y is outside the span of the replies so far, and (b) feeding the
/// current solution M^-1 y as the next query yields a second legal matrix,
/// consistent with every reply, for which that vector is not a solution.
/// Defined for k < n - 1 only; throws std::logic_error otherwise.
inline bool uncertainty_audit(const GeneralAdversaryState& st) {
    if (st.frozen()) throw std::logic_error("uncertainty audit is defined for k < n - 1 only");
    if (span_contains(st.replies, st.y)) return false;

    const BitVector x_now = solve(st.m, st.y);
    GeneralAdversaryState next = st;
    general_adversary_answer(next, x_now);
    if (next.k() != st.k() + 1) return false;
    if (!is_legal_dig(next.m)) return false;
    for (std::size_t i = 0; i < st.k(); ++i) {
        if (mat_vec_mul(next.m, st.accepted[i]) != st.replies[i]) return false;
    }
    return mat_vec_mul(next.m, x_now) != st.y;
}

class GeneralAdversary final : public MxyOracle {
  public:
    explicit GeneralAdversary(std::size_t n) : st_(GeneralAdversaryState::fresh(n)) {}
    GeneralAdversary(std::size_t n, BitVector y) : st_(GeneralAdversaryState::fresh(n, std::move(y))) {}

    std::size_t dimension() const override { return st_.n; }
    const BitVector& target() const override { return st_.y; }
    const GeneralAdversaryState& state() const noexcept { return st_; }

  protected:
    BitVector answer(const BitVector& q) override { return general_adversary_answer(st_, q); }

  private:
    GeneralAdversaryState st_;
};

// ---------------------------------------------------------------------------
// Good-paths adversary

/// `second` was attached to the end of `first` while answering a query.
struct PathJoin {
    std::size_t query_index;  // 1-based
    std::vector<Dim> first;
    std::vector<Dim> second;
};

struct GoodPathsState {
    std::size_t n = 0;
    /// Disjoint paths covering 1..n, ordered by their smallest vertex.
    std::vector<std::vector<Dim>> paths;
    std::vector<bool> good;
    BitMatrix m;
    std::vector<BitVector> queries;
    std::vector<BitVector> replies;
    /// Good-path count initially and after every query.
    std::vector<std::size_t> good_history;
    std::vector<PathJoin> joins;

    static GoodPathsState fresh(std::size_t n) {
        GoodPathsState st;
        st.n = n;
        for (Dim v = 1; v <= n; ++v) st.paths.push_back({v});
        st.good.assign(n, true);
        st.m = BitMatrix::identity(n);
        st.good_history.push_back(n);
        return st;
    }

    std::size_t good_count() const { return static_cast<std::size_t>(std::count(good.begin(), good.end(), true)); }

    /// No alternative instance with a different root set remains.
    bool settled() const { return good_count() == 0 || paths.size() <= 1; }

    BitVector target() const { return BitVector::ones(n); }
};

namespace detail {
inline std::size_t intersection_parity(const BitVector& q, const std::vector<Dim>& path) {
    std::size_t c = 0;
    for (Dim v : path) c += q[v - 1] ? 1 : 0;
    return c & 1U;
}

/// Closure rows after hanging `tail_path` below the last vertex of `head_path`.
inline void attach_path(BitMatrix& m, const std::vector<Dim>& head_path, const std::vector<Dim>& tail_path) {
    const BitVector above = m.row(head_path.back() - 1);
    for (Dim w : tail_path) m.row_mut(w - 1) |= above;
}
}  // namespace detail

/// Good paths hit an odd number of times by q are joined in pairs (the
/// second attached below the first); an unpaired one stops being good.
/// Earlier replies survive because every good path met every earlier query
/// an even number of times.
inline BitVector goodpaths_answer(GoodPathsState& st, const BitVector& q) {
    if (q.size() != st.n) throw DimensionMismatch("query length");
    std::vector<std::size_t> odd;
    for (std::size_t i = 0; i < st.paths.size(); ++i) {
        if (st.good[i] && detail::intersection_parity(q, st.paths[i]) == 1) odd.push_back(i);
    }
    // `paths` is kept ordered by smallest vertex, so `odd` already is.
    const std::size_t query_index = st.queries.size() + 1;
    std::vector<bool> absorbed(st.paths.size(), false);
    for (std::size_t t = 0; t + 1 < odd.size(); t += 2) {
        auto& first = st.paths[odd[t]];
        const auto& second = st.paths[odd[t + 1]];
        st.joins.push_back({query_index, first, second});
        detail::attach_path(st.m, first, second);
        first.insert(first.end(), second.begin(), second.end());
        absorbed[odd[t + 1]] = true;
    }
    if (odd.size() % 2 == 1) st.good[odd.back()] = false;

    std::vector<std::vector<Dim>> paths;
    std::vector<bool> good;
    for (std::size_t i = 0; i < st.paths.size(); ++i) {
        if (absorbed[i]) continue;
        paths.push_back(std::move(st.paths[i]));
        good.push_back(st.good[i]);
    }
    st.paths = std::move(paths);
    st.good = std::move(good);

    BitVector reply = mat_vec_mul(st.m, q);
    st.queries.push_back(q);
    st.replies.push_back(reply);
    st.good_history.push_back(st.good_count());
    return reply;
}

/// (a) every recorded reply is reproduced by the current matrix, (b) every
/// good path met every query an even number of times, (c) the good-path
/// count never fell below half its previous value, and (d) the matrix is
/// realizable and equals the closure of the path system.
inline bool goodpaths_audit(const GoodPathsState& st) {
    if (st.queries.size() != st.replies.size() || st.paths.size() != st.good.size()) return false;
    for (std::size_t i = 0; i < st.queries.size(); ++i) {
        if (mat_vec_mul(st.m, st.queries[i]) != st.replies[i]) return false;
    }
    for (std::size_t i = 0; i < st.paths.size(); ++i) {
        if (!st.good[i]) continue;
        for (const auto& q : st.queries) {
            if (detail::intersection_parity(q, st.paths[i]) != 0) return false;
        }
    }
    for (std::size_t t = 1; t < st.good_history.size(); ++t) {
        if (st.good_history[t] < st.good_history[t - 1] / 2) return false;
    }
    if (!is_legal_dig(st.m) || !is_realizable_dig(st.m)) return false;

    std::vector<Dim> parents(st.n, kNoDim);
    std::vector<bool> seen(st.n, false);
    for (const auto& p : st.paths) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] == 0 || p[i] > st.n || seen[p[i] - 1]) return false;
            seen[p[i] - 1] = true;
            if (i > 0) parents[p[i] - 1] = p[i - 1];
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) return false;
    return closure_of_branching(Branching(std::move(parents))).adjacency() == st.m;
}

/// A second realizable matrix consistent with every reply but with a
/// different root set: another path is hung below the first good path.
/// nullopt once the state is settled.
inline std::optional<BitMatrix> goodpaths_alternative(const GoodPathsState& st) {
    if (st.settled()) return std::nullopt;
    const auto good_it = std::find(st.good.begin(), st.good.end(), true);
    const std::size_t g = static_cast<std::size_t>(good_it - st.good.begin());
    const std::size_t other = g == 0 ? 1 : 0;
    BitMatrix alt = st.m;
    detail::attach_path(alt, st.paths[g], st.paths[other]);
    return alt;
}

class GoodPathsAdversary final : public MxyOracle {
  public:
    explicit GoodPathsAdversary(std::size_t n) : st_(GoodPathsState::fresh(n)), y_(BitVector::ones(n)) {}

    std::size_t dimension() const override { return st_.n; }
    const BitVector& target() const override { return y_; }
    const GoodPathsState& state() const noexcept { return st_; }

  protected:
    BitVector answer(const BitVector& q) override { return goodpaths_answer(st_, q); }

  private:
    GoodPathsState st_;
    BitVector y_;
};

}  // namespace uso
