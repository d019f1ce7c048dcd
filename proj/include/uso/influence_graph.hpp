#pragma once

// Dimension influence graphs and the branchings whose closures realize them.
//
// Graph vertices are the dimensions, labelled 1..n. Label 0 means "none"
// (no parent, unknown ancestor). Adjacency follows the column = source,
// row = target convention: adj(j-1, i-1) == 1 iff there is an edge i -> j,
// so row v lists the in-neighbours of v.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "uso/gf2.hpp"

namespace uso {

/// 1-based dimension label.
using Dim = std::size_t;
inline constexpr Dim kNoDim = 0;

/// Forest of rooted trees with edges directed away from the roots, stored
/// as a parent array (parent label or kNoDim).
class Branching {
  public:
    Branching() = default;

    /// `parents[v-1]` is the parent of v. Throws std::invalid_argument on
    /// out-of-range labels or a cyclic parent map.
    explicit Branching(std::vector<Dim> parents) : parents_(std::move(parents)) {
        for (Dim p : parents_) {
            if (p > parents_.size()) throw std::invalid_argument("parent label " + std::to_string(p) + " out of range");
        }
        if (!is_forest(parents_)) throw std::invalid_argument("cyclic parent map");
    }

    /// True iff following parents from every vertex reaches a root.
    static bool is_forest(const std::vector<Dim>& parents) {
        const std::size_t n = parents.size();
        // 0 = unvisited, 1 = on current walk, 2 = known to reach a root
        std::vector<std::uint8_t> state(n, 0);
        for (std::size_t start = 0; start < n; ++start) {
            std::size_t v = start;
            std::vector<std::size_t> walk;
            while (state[v] != 2) {
                if (state[v] == 1 || parents[v] > n) return false;
                state[v] = 1;
                walk.push_back(v);
                if (parents[v] == kNoDim) break;
                v = parents[v] - 1;
            }
            for (std::size_t w : walk) state[w] = 2;
        }
        return true;
    }

    /// n isolated roots.
    static Branching empty(std::size_t n) { return Branching(std::vector<Dim>(n, kNoDim)); }

    std::size_t size() const noexcept { return parents_.size(); }
    Dim parent(Dim v) const { return parents_.at(v - 1); }
    bool is_root(Dim v) const { return parent(v) == kNoDim; }
    const std::vector<Dim>& parents() const noexcept { return parents_; }

    /// Depth of every vertex (roots at 0), indexed by label - 1.
    std::vector<std::size_t> depths() const {
        const std::size_t n = size();
        std::vector<std::size_t> depth(n, 0);
        std::vector<bool> done(n, false);
        for (std::size_t start = 0; start < n; ++start) {
            std::vector<std::size_t> walk;
            std::size_t v = start;
            while (!done[v] && parents_[v] != kNoDim) {
                walk.push_back(v);
                v = parents_[v] - 1;
            }
            std::size_t d = depth[v];
            done[v] = true;
            for (auto it = walk.rbegin(); it != walk.rend(); ++it) {
                depth[*it] = ++d;
                done[*it] = true;
            }
        }
        return depth;
    }

    /// Labels ordered so that every parent precedes its children.
    std::vector<Dim> topological_order() const {
        const auto depth = depths();
        std::vector<Dim> order(size());
        std::iota(order.begin(), order.end(), Dim{1});
        std::stable_sort(order.begin(), order.end(), [&](Dim a, Dim b) { return depth[a - 1] < depth[b - 1]; });
        return order;
    }

    bool operator==(const Branching&) const = default;

  private:
    std::vector<Dim> parents_;
};

/// True iff every diagonal entry is 1 and the off-diagonal part is acyclic.
inline bool is_legal_dig(const BitMatrix& m) {
    if (!m.is_square()) return false;
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i) {
        if (!m(i, i)) return false;
    }
    // Kahn's algorithm on the loop-free graph; columns give out-neighbours.
    const BitMatrix out = m.transposed();
    std::vector<std::size_t> indeg(n);
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v) {
        indeg[v] = m.row(v).count() - 1;
        if (indeg[v] == 0) ready.push_back(v);
    }
    std::size_t seen = 0;
    while (!ready.empty()) {
        const std::size_t u = ready.back();
        ready.pop_back();
        ++seen;
        for (std::size_t w : out.row(u).support()) {
            if (w != u && --indeg[w] == 0) ready.push_back(w);
        }
    }
    return seen == n;
}

class DimensionInfluenceGraph {
  public:
    DimensionInfluenceGraph() = default;

    /// Throws std::invalid_argument unless `adj` is a legal DIG.
    explicit DimensionInfluenceGraph(BitMatrix adj) : adj_(std::move(adj)) {
        if (!is_legal_dig(adj_)) throw std::invalid_argument("matrix is not a legal dimension influence graph");
    }

    static DimensionInfluenceGraph identity(std::size_t n) { return DimensionInfluenceGraph(BitMatrix::identity(n)); }

    std::size_t size() const noexcept { return adj_.rows(); }
    const BitMatrix& adjacency() const noexcept { return adj_; }

    bool has_edge(Dim from, Dim to) const { return adj_.at(to - 1, from - 1); }
    /// In-neighbours of v (including v itself) as a 0-based indicator row.
    const BitVector& in_row(Dim v) const { return adj_.row(v - 1); }
    std::size_t in_degree(Dim v) const { return in_row(v).count(); }

    bool operator==(const DimensionInfluenceGraph&) const = default;

  private:
    BitMatrix adj_;
};

/// adj(j, i) = 1 iff i == j or i is a strict ancestor of j.
inline DimensionInfluenceGraph closure_of_branching(const Branching& b) {
    const std::size_t n = b.size();
    BitMatrix adj(n, n);
    for (Dim v : b.topological_order()) {
        BitVector& row = adj.row_mut(v - 1);
        if (!b.is_root(v)) row = adj.row(b.parent(v) - 1);
        row.set(v - 1);
    }
    return DimensionInfluenceGraph(std::move(adj));
}

/// Transitive reduction of the loop-free part of a legal DIG. The result has
/// an empty diagonal; row v holds the in-neighbours of v that are not implied
/// by a longer path.
inline BitMatrix transitive_reduction(const BitMatrix& m) {
    if (!is_legal_dig(m)) throw std::invalid_argument("transitive reduction needs a legal dimension influence graph");
    const std::size_t n = m.rows();
    // Topological order by repeatedly removing vertices without remaining
    // in-neighbours.
    const BitMatrix out = m.transposed();
    std::vector<std::size_t> indeg(n);
    std::vector<std::size_t> order;
    order.reserve(n);
    std::queue<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v) {
        indeg[v] = m.row(v).count() - 1;
        if (indeg[v] == 0) ready.push(v);
    }
    while (!ready.empty()) {
        const std::size_t u = ready.front();
        ready.pop();
        order.push_back(u);
        for (std::size_t w : out.row(u).support()) {
            if (w != u && --indeg[w] == 0) ready.push(w);
        }
    }

    std::vector<BitVector> ancestors(n, BitVector(n));
    BitMatrix reduced(n, n);
    for (std::size_t v : order) {
        BitVector direct = m.row(v);
        direct.reset(v);
        BitVector implied(n);
        for (std::size_t w : direct.support()) {
            implied |= ancestors[w];
            ancestors[v] |= ancestors[w];
        }
        ancestors[v] |= direct;
        BitVector kept = direct;
        kept ^= (direct & implied);
        reduced.row_mut(v) = std::move(kept);
    }
    return reduced;
}

/// Realizable iff the transitive reduction is a branching whose reflexive
/// transitive closure gives back the matrix. Throws on illegal input.
inline bool is_realizable_dig(const BitMatrix& m) {
    if (!is_legal_dig(m)) throw std::invalid_argument("matrix is not a legal dimension influence graph");
    const BitMatrix reduced = transitive_reduction(m);
    const std::size_t n = m.rows();
    std::vector<Dim> parents(n, kNoDim);
    for (std::size_t v = 0; v < n; ++v) {
        const auto in = reduced.row(v).support();
        if (in.size() > 1) return false;
        if (in.size() == 1) parents[v] = in.front() + 1;
    }
    return closure_of_branching(Branching(std::move(parents))).adjacency() == m;
}

/// Underlying branching of a realizable graph. Throws if not realizable.
inline Branching branching_of(const DimensionInfluenceGraph& g) {
    if (!is_realizable_dig(g.adjacency())) throw std::invalid_argument("graph is not realizable");
    const BitMatrix reduced = transitive_reduction(g.adjacency());
    std::vector<Dim> parents(g.size(), kNoDim);
    for (std::size_t v = 0; v < g.size(); ++v) {
        const std::size_t p = reduced.row(v).first_set();
        if (p < g.size()) parents[v] = p + 1;
    }
    return Branching(std::move(parents));
}

/// Level of every vertex in the underlying branching.
class LevelAssignment {
  public:
    LevelAssignment() = default;
    /// `levels[v-1]` is the level of v.
    explicit LevelAssignment(std::vector<std::size_t> levels) : levels_(std::move(levels)) {}

    std::size_t size() const noexcept { return levels_.size(); }
    std::size_t level(Dim v) const { return levels_.at(v - 1); }
    std::size_t max_level() const noexcept {
        return levels_.empty() ? 0 : *std::max_element(levels_.begin(), levels_.end());
    }
    const std::vector<std::size_t>& values() const noexcept { return levels_; }

    /// Vertices grouped by level: result[l] lists the labels on level l.
    std::vector<std::vector<Dim>> by_level() const {
        std::vector<std::vector<Dim>> out(levels_.empty() ? 0 : max_level() + 1);
        for (std::size_t i = 0; i < levels_.size(); ++i) out[levels_[i]].push_back(i + 1);
        return out;
    }

    bool operator==(const LevelAssignment&) const = default;

  private:
    std::vector<std::size_t> levels_;
};

/// lvl[v] = in-degree of v - 1. Only meaningful for realizable graphs.
inline LevelAssignment levels_of(const DimensionInfluenceGraph& g) {
    if (!is_realizable_dig(g.adjacency())) throw std::invalid_argument("levels are defined for realizable graphs only");
    std::vector<std::size_t> lvl(g.size());
    for (Dim v = 1; v <= g.size(); ++v) lvl[v - 1] = g.in_degree(v) - 1;
    return LevelAssignment(std::move(lvl));
}

/// The unique in-neighbour of v on level `level` (level < lvl[v]).
inline Dim ancestor_of(const DimensionInfluenceGraph& g, Dim v, std::size_t level) {
    const std::size_t own = g.in_degree(v) - 1;
    if (level >= own) {
        throw std::out_of_range("vertex " + std::to_string(v) + " on level " + std::to_string(own) +
                                " has no ancestor on level " + std::to_string(level));
    }
    for (std::size_t w : g.in_row(v).support()) {
        if (w + 1 != v && g.in_degree(w + 1) - 1 == level) return w + 1;
    }
    throw std::invalid_argument("graph has no unique ancestor on the requested level");
}

/// Uniformly random branching on n vertices: a random Pruefer sequence over
/// {0..n} decodes to a labelled tree on n+1 nodes, which rooted at node 0
/// is a rooted forest on 1..n.
inline Branching random_branching(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n);
    std::vector<std::size_t> code(n - 1);
    for (auto& c : code) c = pick(rng);

    const std::size_t nodes = n + 1;
    std::vector<std::size_t> degree(nodes, 1);
    for (std::size_t c : code) ++degree[c];
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> leaves;
    for (std::size_t v = 0; v < nodes; ++v) {
        if (degree[v] == 1) leaves.push(v);
    }
    std::vector<std::vector<std::size_t>> nbrs(nodes);
    auto link = [&](std::size_t a, std::size_t b) {
        nbrs[a].push_back(b);
        nbrs[b].push_back(a);
    };
    for (std::size_t c : code) {
        const std::size_t leaf = leaves.top();
        leaves.pop();
        link(leaf, c);
        if (--degree[c] == 1) leaves.push(c);
    }
    const std::size_t a = leaves.top();
    leaves.pop();
    link(a, leaves.top());

    std::vector<Dim> parents(n, kNoDim);
    std::vector<bool> seen(nodes, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t w : nbrs[u]) {
            if (seen[w]) continue;
            seen[w] = true;
            parents[w - 1] = u;  // node 0 is the virtual root, so u doubles as the label
            stack.push_back(w);
        }
    }
    return Branching(std::move(parents));
}

/// M = P A P^T for a random unit upper-triangular A and random permutation P.
inline DimensionInfluenceGraph random_legal_dig(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m.set(perm[i], perm[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            if (coin(rng)) m.set(perm[i], perm[j]);
        }
    }
    return DimensionInfluenceGraph(std::move(m));
}

inline constexpr std::size_t kMaxEnumeratedBranchings = 6;
inline constexpr std::size_t kMaxEnumeratedDigs = 4;

/// All branchings on n vertices, in lexicographic order of parent arrays.
inline std::vector<Branching> enumerate_branchings(std::size_t n) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    if (n > kMaxEnumeratedBranchings) throw std::length_error("enumeration bound exceeded");
    std::vector<Branching> out;
    std::vector<Dim> parents(n, kNoDim);
    while (true) {
        if (Branching::is_forest(parents)) out.emplace_back(parents);
        std::size_t i = n;
        while (i > 0) {
            --i;
            if (parents[i] < n) {
                ++parents[i];
                break;
            }
            parents[i] = kNoDim;
            if (i == 0) return out;
        }
    }
}

/// All legal DIG adjacency matrices on n vertices.
inline std::vector<DimensionInfluenceGraph> enumerate_legal_digs(std::size_t n) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    if (n > kMaxEnumeratedDigs) throw std::length_error("enumeration bound exceeded");
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            if (r != c) slots.emplace_back(r, c);
        }
    }
    std::vector<DimensionInfluenceGraph> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << slots.size()); ++mask) {
        BitMatrix m = BitMatrix::identity(n);
        for (std::size_t k = 0; k < slots.size(); ++k) {
            if ((mask >> k) & 1U) m.set(slots[k].first, slots[k].second);
        }
        if (is_legal_dig(m)) out.emplace_back(std::move(m));
    }
    return out;
}

}  // namespace uso
