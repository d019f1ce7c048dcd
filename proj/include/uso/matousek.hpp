#pragma once

// Matousek-type unique sink orientations o(v) = M (v xor s), the two oracle
// models (vertex evaluation and matrix-vector product), and exhaustive
// checkers for the defining properties.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uso/gf2.hpp"
#include "uso/influence_graph.hpp"

namespace uso {

class MatousekUso {
  public:
    MatousekUso() = default;

    /// Throws std::invalid_argument if `m` is not a legal DIG or the sink has
    /// the wrong length.
    MatousekUso(BitMatrix m, BitVector sink) : graph_(std::move(m)), sink_(std::move(sink)) {
        if (sink_.size() != graph_.size()) throw DimensionMismatch("sink length differs from matrix size");
    }
    MatousekUso(DimensionInfluenceGraph g, BitVector sink) : graph_(std::move(g)), sink_(std::move(sink)) {
        if (sink_.size() != graph_.size()) throw DimensionMismatch("sink length differs from matrix size");
    }

    std::size_t dimension() const noexcept { return graph_.size(); }
    const BitMatrix& matrix() const noexcept { return graph_.adjacency(); }
    const DimensionInfluenceGraph& graph() const noexcept { return graph_; }
    const BitVector& sink() const noexcept { return sink_; }

    BitVector outmap(const BitVector& v) const { return mat_vec_mul(matrix(), v ^ sink_); }

    bool operator==(const MatousekUso&) const = default;

  private:
    DimensionInfluenceGraph graph_;
    BitVector sink_;
};

inline BitVector outmap(const MatousekUso& u, const BitVector& v) { return u.outmap(v); }

/// A query and the oracle's reply.
struct QueryRecord {
    BitVector query;
    BitVector reply;
    bool operator==(const QueryRecord&) const = default;
};

using Transcript = std::vector<QueryRecord>;

/// Vertex evaluation oracle. Every call to evaluate() is counted and
/// recorded, repeated vertices included; subclasses supply the outmap.
class VertexOracle {
  public:
    virtual ~VertexOracle() = default;

    virtual std::size_t dimension() const = 0;

    BitVector evaluate(const BitVector& v) {
        if (v.size() != dimension()) throw DimensionMismatch("vertex length");
        BitVector o = compute_outmap(v);
        transcript_.push_back({v, o});
        return o;
    }

    std::size_t query_count() const noexcept { return transcript_.size(); }
    const Transcript& transcript() const noexcept { return transcript_; }

  protected:
    virtual BitVector compute_outmap(const BitVector& v) = 0;

  private:
    Transcript transcript_;
};

/// Matrix-vector product oracle for an Mx = y instance. The target y is
/// public; M is reachable only through query().
class MxyOracle {
  public:
    virtual ~MxyOracle() = default;

    virtual std::size_t dimension() const = 0;
    virtual const BitVector& target() const = 0;

    BitVector query(const BitVector& q) {
        if (q.size() != dimension()) throw DimensionMismatch("query length");
        BitVector r = answer(q);
        transcript_.push_back({q, r});
        return r;
    }

    std::size_t query_count() const noexcept { return transcript_.size(); }
    const Transcript& transcript() const noexcept { return transcript_; }

  protected:
    virtual BitVector answer(const BitVector& q) = 0;

  private:
    Transcript transcript_;
};

/// Vertex evaluations served from a Matousek-type instance.
class UsoVertexOracle final : public VertexOracle {
  public:
    explicit UsoVertexOracle(MatousekUso uso) : uso_(std::move(uso)) {}
    std::size_t dimension() const override { return uso_.dimension(); }
    const MatousekUso& instance() const noexcept { return uso_; }

  protected:
    BitVector compute_outmap(const BitVector& v) override { return uso_.outmap(v); }

  private:
    MatousekUso uso_;
};

/// Vertex evaluations served from an explicit outmap table indexed by the
/// integer encoding of the vertex (entry i -> bit i).
class TableVertexOracle final : public VertexOracle {
  public:
    TableVertexOracle(std::size_t n, std::vector<std::uint64_t> table) : n_(n), table_(std::move(table)) {
        if (n_ >= 32 || table_.size() != (std::size_t{1} << n_)) throw DimensionMismatch("outmap table size");
    }
    std::size_t dimension() const override { return n_; }

  protected:
    BitVector compute_outmap(const BitVector& v) override {
        return BitVector::from_integer(n_, table_[static_cast<std::size_t>(v.to_integer())]);
    }

  private:
    std::size_t n_;
    std::vector<std::uint64_t> table_;
};

/// Honest matrix-vector oracle over a fixed hidden matrix.
class MatrixMxyOracle final : public MxyOracle {
  public:
    MatrixMxyOracle(BitMatrix m, BitVector y) : m_(std::move(m)), y_(std::move(y)) {
        if (!m_.is_square() || y_.size() != m_.rows()) throw DimensionMismatch("Mx=y instance shape");
    }
    std::size_t dimension() const override { return m_.rows(); }
    const BitVector& target() const override { return y_; }
    const BitMatrix& hidden_matrix() const noexcept { return m_; }

  protected:
    BitVector answer(const BitVector& q) override { return mat_vec_mul(m_, q); }

  private:
    BitMatrix m_;
    BitVector y_;
};

// ---------------------------------------------------------------------------
// Exhaustive checks. Outmaps are handled as integers (entry i -> bit i), so
// these are limited to small n.

using OutmapFn = std::function<std::uint64_t(std::uint64_t)>;

inline constexpr std::size_t kMaxConsistencyDim = 12;
inline constexpr std::size_t kMaxUsoCheckDim = 8;
inline constexpr std::size_t kMaxParallelLawDim = 8;
inline constexpr std::size_t kExhaustiveParallelLawDim = 5;

inline OutmapFn outmap_fn(const MatousekUso& u) {
    return [u](std::uint64_t v) { return u.outmap(BitVector::from_integer(u.dimension(), v)).to_integer(); };
}

/// Outmap table of a Matousek-type USO, computed by linearity.
inline std::vector<std::uint64_t> outmap_table(const MatousekUso& u) {
    const std::size_t n = u.dimension();
    if (n > kMaxConsistencyDim) throw std::length_error("outmap table too large");
    std::vector<std::uint64_t> cols(n);
    for (std::size_t i = 0; i < n; ++i) cols[i] = u.matrix().column(i).to_integer();
    const std::uint64_t s = u.sink().to_integer();
    std::vector<std::uint64_t> table(std::size_t{1} << n);
    for (std::uint64_t v = 0; v < table.size(); ++v) {
        std::uint64_t d = v ^ s;
        std::uint64_t o = 0;
        for (std::size_t i = 0; d != 0; ++i, d >>= 1) {
            if (d & 1U) o ^= cols[i];
        }
        table[v] = o;
    }
    return table;
}

/// A vertex v and dimension i with o(v)_i == o(v xor e_i)_i.
struct EdgeConflict {
    std::uint64_t vertex;
    std::size_t dim;  // 0-based
};

inline std::optional<EdgeConflict> find_edge_conflict(const OutmapFn& o, std::size_t n) {
    if (n > kMaxConsistencyDim) throw std::length_error("orientation check limited to n <= 12");
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
        const std::uint64_t ov = o(v);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t w = v ^ (std::uint64_t{1} << i);
            if (w < v) continue;
            if (((ov ^ o(w)) >> i & 1U) == 0) return EdgeConflict{v, i};
        }
    }
    return std::nullopt;
}

/// o(v)_i != o(v xor e_i)_i for all v, i.
inline bool check_orientation_consistency(const OutmapFn& o, std::size_t n) {
    return !find_edge_conflict(o, n).has_value();
}

/// A face (free coordinates `free_mask`, the rest fixed as in `anchor`)
/// together with its number of sinks.
struct FaceViolation {
    std::uint64_t free_mask;
    std::uint64_t anchor;
    std::size_t sinks;
};

/// Counts sinks of every face at once: v is the sink of face (F, v & ~F)
/// iff o(v) & F == 0.
inline std::optional<FaceViolation> find_face_violation(const OutmapFn& o, std::size_t n) {
    if (n > kMaxUsoCheckDim) throw std::length_error("USO check limited to n <= 8");
    if (!check_orientation_consistency(o, n)) throw std::invalid_argument("orientation is not consistent");
    const std::uint64_t vertices = std::uint64_t{1} << n;
    std::vector<std::uint64_t> out(vertices);
    for (std::uint64_t v = 0; v < vertices; ++v) out[v] = o(v);
    std::vector<std::size_t> sinks(vertices);
    for (std::uint64_t mask = 0; mask < vertices; ++mask) {
        std::fill(sinks.begin(), sinks.end(), 0);
        for (std::uint64_t v = 0; v < vertices; ++v) {
            if ((out[v] & mask) == 0) ++sinks[v & ~mask];
        }
        for (std::uint64_t v = 0; v < vertices; ++v) {
            if ((v & mask) == 0 && sinks[v] != 1) return FaceViolation{mask, v, sinks[v]};
        }
    }
    return std::nullopt;
}

/// Every non-empty face has exactly one sink. Throws std::invalid_argument
/// on an inconsistent orientation.
inline bool check_uso(const OutmapFn& o, std::size_t n) { return !find_face_violation(o, n).has_value(); }

/// A vertex pair breaking o(x) xor o(y) = M (x xor y).
struct ParallelViolation {
    std::uint64_t x;
    std::uint64_t y;
};

/// Exhaustive over all pairs for n <= 5, 4096 seeded random pairs above.
inline std::optional<ParallelViolation> find_parallel_violation(const OutmapFn& o, const BitMatrix& m,
                                                                std::uint64_t sample_seed = 0x5eed) {
    const std::size_t n = m.rows();
    if (n > kMaxParallelLawDim) throw std::length_error("parallel law check limited to n <= 8");
    const std::uint64_t vertices = std::uint64_t{1} << n;
    std::vector<std::uint64_t> out(vertices);
    for (std::uint64_t v = 0; v < vertices; ++v) out[v] = o(v);
    auto holds = [&](std::uint64_t x, std::uint64_t y) {
        return (out[x] ^ out[y]) == mat_vec_mul(m, BitVector::from_integer(n, x ^ y)).to_integer();
    };
    if (n <= kExhaustiveParallelLawDim) {
        for (std::uint64_t x = 0; x < vertices; ++x) {
            for (std::uint64_t y = x; y < vertices; ++y) {
                if (!holds(x, y)) return ParallelViolation{x, y};
            }
        }
        return std::nullopt;
    }
    std::mt19937_64 rng(sample_seed);
    std::uniform_int_distribution<std::uint64_t> pick(0, vertices - 1);
    for (int t = 0; t < 4096; ++t) {
        const std::uint64_t x = pick(rng);
        const std::uint64_t y = pick(rng);
        if (!holds(x, y)) return ParallelViolation{x, y};
    }
    return std::nullopt;
}

inline bool check_parallel_law(const MatousekUso& u) {
    return !find_parallel_violation(outmap_fn(u), u.matrix()).has_value();
}

/// Dimension d (1-based) is combed iff o(v)_d is the same for all v with
/// v_d = 0, which for this class means row d of M is e_d.
inline bool is_combed(const MatousekUso& u, Dim d) {
    if (d == 0 || d > u.dimension()) throw std::out_of_range("dimension label out of range");
    return u.matrix().row(d - 1) == BitVector::unit(u.dimension(), d - 1);
}

/// Random Matousek-type instance. `realizable` draws the matrix as the
/// closure of a uniform random branching; otherwise via random_legal_dig.
inline MatousekUso random_instance(std::size_t n, bool realizable, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::uint64_t graph_seed = rng();
    BitVector sink(n);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < n; ++i) sink.set(i, coin(rng));
    if (realizable) return MatousekUso(closure_of_branching(random_branching(n, graph_seed)), std::move(sink));
    return MatousekUso(random_legal_dig(n, graph_seed), std::move(sink));
}

}  // namespace uso
