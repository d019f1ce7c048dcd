#pragma once

// Dense linear algebra over GF(2).
//
// BitVector and BitMatrix store entries packed into 64-bit words. Storage
// indices are 0-based; the bit-string form prints index 0 leftmost.

#include <algorithm>
#include <bit>
#include <iterator>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace uso {

/// Thrown when operand shapes do not fit together.
class DimensionMismatch : public std::invalid_argument {
  public:
    explicit DimensionMismatch(const std::string& what)
        : std::invalid_argument("dimension mismatch: " + what) {}
};

/// Thrown by solve() when the coefficient matrix is not invertible.
class SingularMatrix : public std::domain_error {
  public:
    SingularMatrix() : std::domain_error("singular") {}
};

class BitVector {
  public:
    using Word = std::uint64_t;
    static constexpr std::size_t kWordBits = 64;

    BitVector() = default;
    explicit BitVector(std::size_t n) : size_(n), words_((n + kWordBits - 1) / kWordBits, 0) {}

    static BitVector zeros(std::size_t n) { return BitVector(n); }

    static BitVector ones(std::size_t n) {
        BitVector v(n);
        for (auto& w : v.words_) w = ~Word{0};
        v.trim();
        return v;
    }

    static BitVector unit(std::size_t n, std::size_t i) {
        BitVector v(n);
        v.set(i);
        return v;
    }

    /// Low `n` bits of `bits`, bit i of the integer becoming entry i.
    static BitVector from_integer(std::size_t n, std::uint64_t bits) {
        if (n > kWordBits) throw DimensionMismatch("from_integer needs n <= 64");
        BitVector v(n);
        if (n > 0) v.words_[0] = bits;
        v.trim();
        return v;
    }

    /// Parses a string of '0'/'1' characters, entry 0 first.
    static BitVector parse(std::string_view s) {
        BitVector v(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1') {
                v.set(i);
            } else if (s[i] != '0') {
                throw std::invalid_argument("bit string contains '" + std::string(1, s[i]) + "'");
            }
        }
        return v;
    }

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    bool operator[](std::size_t i) const noexcept {
        return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
    }
    bool test(std::size_t i) const {
        check_index(i);
        return (*this)[i];
    }
    void set(std::size_t i, bool value = true) {
        check_index(i);
        const Word mask = Word{1} << (i % kWordBits);
        if (value) {
            words_[i / kWordBits] |= mask;
        } else {
            words_[i / kWordBits] &= ~mask;
        }
    }
    void reset(std::size_t i) { set(i, false); }
    void flip(std::size_t i) {
        check_index(i);
        words_[i / kWordBits] ^= Word{1} << (i % kWordBits);
    }

    BitVector& operator^=(const BitVector& other) {
        require_same_size(other);
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
        return *this;
    }
    BitVector& operator&=(const BitVector& other) {
        require_same_size(other);
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
        return *this;
    }
    BitVector& operator|=(const BitVector& other) {
        require_same_size(other);
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
        return *this;
    }
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
    friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }
    friend BitVector operator|(BitVector a, const BitVector& b) { return a |= b; }

    bool operator==(const BitVector&) const = default;

    std::size_t count() const noexcept {
        std::size_t c = 0;
        for (Word w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool any() const noexcept {
        return std::any_of(words_.begin(), words_.end(), [](Word w) { return w != 0; });
    }
    bool none() const noexcept { return !any(); }

    /// Inner product mod 2.
    bool dot(const BitVector& other) const {
        require_same_size(other);
        Word acc = 0;
        for (std::size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & other.words_[w];
        return std::popcount(acc) & 1;
    }

    /// Index of the lowest set entry, or size() when the vector is zero.
    std::size_t first_set() const noexcept {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            if (words_[w] != 0) return w * kWordBits + static_cast<std::size_t>(std::countr_zero(words_[w]));
        }
        return size_;
    }

    /// Indices of all set entries in ascending order.
    std::vector<std::size_t> support() const {
        std::vector<std::size_t> out;
        for (std::size_t w = 0; w < words_.size(); ++w) {
            Word bits = words_[w];
            while (bits != 0) {
                out.push_back(w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits)));
                bits &= bits - 1;
            }
        }
        return out;
    }

    /// Entries 0..63 packed into an integer (entry i -> bit i).
    std::uint64_t to_integer() const {
        if (size_ > kWordBits) throw DimensionMismatch("to_integer needs n <= 64");
        return words_.empty() ? 0 : words_[0];
    }

    std::string to_string() const {
        std::string s(size_, '0');
        for (std::size_t i = 0; i < size_; ++i) {
            if ((*this)[i]) s[i] = '1';
        }
        return s;
    }

    std::span<const Word> words() const noexcept { return words_; }

  private:
    void check_index(std::size_t i) const {
        if (i >= size_) throw std::out_of_range("bit index " + std::to_string(i) + " out of range");
    }
    void require_same_size(const BitVector& other) const {
        if (other.size_ != size_) {
            throw DimensionMismatch("vector lengths " + std::to_string(size_) + " and " +
                                    std::to_string(other.size_));
        }
    }
    void trim() noexcept {
        if (size_ % kWordBits != 0 && !words_.empty()) {
            words_.back() &= (Word{1} << (size_ % kWordBits)) - 1;
        }
    }

    std::size_t size_ = 0;
    std::vector<Word> words_;
};

/// Row-major GF(2) matrix; each row is a BitVector of length cols().
class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVector(cols)) {}

    static BitMatrix identity(std::size_t n) {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.rows_[i].set(i);
        return m;
    }

    /// Stacks the given vectors as rows. All must share one length.
    static BitMatrix from_rows(std::span<const BitVector> rows, std::size_t cols) {
        BitMatrix m(0, cols);
        for (const auto& r : rows) m.append_row(r);
        return m;
    }

    /// Each string is one row of '0'/'1' characters.
    static BitMatrix parse(std::span<const std::string> rows) {
        if (rows.empty()) return BitMatrix{};
        BitMatrix m(0, rows.front().size());
        for (const auto& r : rows) m.append_row(BitVector::parse(r));
        return m;
    }

    std::size_t rows() const noexcept { return rows_.size(); }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows() == cols(); }

    bool operator()(std::size_t r, std::size_t c) const noexcept { return rows_[r][c]; }
    bool at(std::size_t r, std::size_t c) const { return row(r).test(c); }
    void set(std::size_t r, std::size_t c, bool value = true) { row_mut(r).set(c, value); }
    void flip(std::size_t r, std::size_t c) { row_mut(r).flip(c); }

    const BitVector& row(std::size_t r) const {
        if (r >= rows_.size()) throw std::out_of_range("row index " + std::to_string(r) + " out of range");
        return rows_[r];
    }
    BitVector& row_mut(std::size_t r) {
        if (r >= rows_.size()) throw std::out_of_range("row index " + std::to_string(r) + " out of range");
        return rows_[r];
    }

    BitVector column(std::size_t c) const {
        if (c >= cols_) throw std::out_of_range("column index " + std::to_string(c) + " out of range");
        BitVector v(rows());
        for (std::size_t r = 0; r < rows(); ++r) {
            if (rows_[r][c]) v.set(r);
        }
        return v;
    }
    void set_column(std::size_t c, const BitVector& v) {
        if (v.size() != rows()) throw DimensionMismatch("column length");
        for (std::size_t r = 0; r < rows(); ++r) row_mut(r).set(c, v[r]);
    }

    void append_row(const BitVector& r) {
        if (r.size() != cols_) {
            throw DimensionMismatch("row of length " + std::to_string(r.size()) + " into matrix with " +
                                    std::to_string(cols_) + " columns");
        }
        rows_.push_back(r);
    }

    BitMatrix transposed() const {
        BitMatrix t(cols_, rows());
        for (std::size_t r = 0; r < rows(); ++r) {
            for (std::size_t c : rows_[r].support()) t.rows_[c].set(r);
        }
        return t;
    }

    BitMatrix& operator^=(const BitMatrix& other) {
        if (other.rows() != rows() || other.cols() != cols()) throw DimensionMismatch("matrix sum");
        for (std::size_t r = 0; r < rows(); ++r) rows_[r] ^= other.rows_[r];
        return *this;
    }

    bool operator==(const BitMatrix&) const = default;

    std::vector<std::string> to_strings() const {
        std::vector<std::string> out;
        out.reserve(rows());
        for (const auto& r : rows_) out.push_back(r.to_string());
        return out;
    }

  private:
    std::size_t cols_ = 0;
    std::vector<BitVector> rows_;
};

/// y_i = XOR_j M_ij x_j
inline BitVector mat_vec_mul(const BitMatrix& m, const BitVector& x) {
    if (x.size() != m.cols()) {
        throw DimensionMismatch("matrix with " + std::to_string(m.cols()) + " columns times vector of length " +
                                std::to_string(x.size()));
    }
    BitVector y(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (m.row(r).dot(x)) y.set(r);
    }
    return y;
}

inline BitMatrix mat_mul(const BitMatrix& a, const BitMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matrix product");
    BitMatrix c(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        BitVector acc(b.cols());
        for (std::size_t k : a.row(r).support()) acc ^= b.row(k);
        c.row_mut(r) = acc;
    }
    return c;
}

namespace detail {

// Reduced row echelon form with the leftmost available column as pivot of
// each successive row. Returns the pivot column of each nonzero row.
// `aug` (optional) receives the same row operations.
inline std::vector<std::size_t> rref_in_place(std::vector<BitVector>& rows, std::size_t cols,
                                              std::vector<BitVector>* aug = nullptr) {
    std::vector<std::size_t> pivots;
    std::size_t next = 0;
    for (std::size_t c = 0; c < cols && next < rows.size(); ++c) {
        std::size_t p = next;
        while (p < rows.size() && !rows[p][c]) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[next]);
        if (aug) std::swap((*aug)[p], (*aug)[next]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != next && rows[r][c]) {
                rows[r] ^= rows[next];
                if (aug) (*aug)[r] ^= (*aug)[next];
            }
        }
        pivots.push_back(c);
        ++next;
    }
    return pivots;
}

}  // namespace detail

inline std::size_t rank(const BitMatrix& m) {
    std::vector<BitVector> rows;
    rows.reserve(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
    return detail::rref_in_place(rows, m.cols()).size();
}

/// Unique x with Mx = y for square invertible M.
inline BitVector solve(const BitMatrix& m, const BitVector& y) {
    if (!m.is_square()) throw DimensionMismatch("solve needs a square matrix");
    if (y.size() != m.rows()) throw DimensionMismatch("right-hand side length");
    const std::size_t n = m.rows();
    std::vector<BitVector> rows;
    std::vector<BitVector> rhs;
    rows.reserve(n);
    rhs.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        rows.push_back(m.row(r));
        rhs.push_back(BitVector(1));
        if (y[r]) rhs.back().set(0);
    }
    const auto pivots = detail::rref_in_place(rows, n, &rhs);
    if (pivots.size() != n) throw SingularMatrix{};
    BitVector x(n);
    for (std::size_t r = 0; r < n; ++r) {
        if (rhs[r][0]) x.set(pivots[r]);
    }
    return x;
}

inline BitMatrix inverse(const BitMatrix& m) {
    if (!m.is_square()) throw DimensionMismatch("inverse needs a square matrix");
    const std::size_t n = m.rows();
    std::vector<BitVector> rows;
    std::vector<BitVector> aug;
    for (std::size_t r = 0; r < n; ++r) {
        rows.push_back(m.row(r));
        aug.push_back(BitVector::unit(n, r));
    }
    if (detail::rref_in_place(rows, n, &aug).size() != n) throw SingularMatrix{};
    BitMatrix inv(0, n);
    for (auto& r : aug) inv.append_row(r);
    return inv;
}

/// XOR basis that remembers, for every basis element, which combination of
/// the inserted vectors produced it. Used for span tests and for answering
/// linearly dependent queries from earlier replies.
class SpanTracker {
  public:
    explicit SpanTracker(std::size_t n) : n_(n) {}

    std::size_t dimension() const noexcept { return n_; }
    std::size_t size() const noexcept { return inserted_; }
    std::size_t rank() const noexcept { return basis_.size(); }

    /// Coefficients over the inserted vectors (by insertion index) that sum
    /// to v, or nullopt if v is outside the span.
    std::optional<std::vector<std::size_t>> express(const BitVector& v) const {
        if (v.size() != n_) throw DimensionMismatch("span membership");
        BitVector rest = v;
        std::vector<bool> used(inserted_, false);
        for (const auto& b : basis_) {
            if (rest[b.lead]) {
                rest ^= b.vec;
                for (std::size_t i : b.combo) used[i] = !used[i];
            }
        }
        if (rest.any()) return std::nullopt;
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < used.size(); ++i) {
            if (used[i]) out.push_back(i);
        }
        return out;
    }

    bool contains(const BitVector& v) const { return express(v).has_value(); }

    /// Inserts v; returns true if it increased the rank.
    bool insert(const BitVector& v) {
        if (v.size() != n_) throw DimensionMismatch("span insert");
        BitVector rest = v;
        std::vector<std::size_t> combo{inserted_};
        for (const auto& b : basis_) {
            if (rest[b.lead]) {
                rest ^= b.vec;
                combo = symmetric_difference(combo, b.combo);
            }
        }
        ++inserted_;
        if (rest.none()) return false;
        const std::size_t lead = rest.first_set();
        // Keep the basis fully reduced on lead positions.
        for (auto& b : basis_) {
            if (b.vec[lead]) {
                b.vec ^= rest;
                b.combo = symmetric_difference(b.combo, combo);
            }
        }
        basis_.push_back({lead, std::move(rest), std::move(combo)});
        return true;
    }

  private:
    struct Element {
        std::size_t lead;
        BitVector vec;
        std::vector<std::size_t> combo;
    };

    static std::vector<std::size_t> symmetric_difference(const std::vector<std::size_t>& a,
                                                         const std::vector<std::size_t>& b) {
        std::vector<std::size_t> out;
        std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        return out;
    }

    std::size_t n_;
    std::size_t inserted_ = 0;
    std::vector<Element> basis_;
};

/// True iff y is a GF(2) combination of vs (the empty combination included).
inline bool span_contains(std::span<const BitVector> vs, const BitVector& y) {
    SpanTracker t(y.size());
    for (const auto& v : vs) t.insert(v);
    return t.contains(y);
}

/// Non-pivot columns of X after leftmost-pivot row reduction, ascending.
inline std::vector<std::size_t> free_variables(const BitMatrix& x) {
    std::vector<BitVector> rows;
    for (std::size_t r = 0; r < x.rows(); ++r) rows.push_back(x.row(r));
    const auto pivots = detail::rref_in_place(rows, x.cols());
    std::vector<std::size_t> out;
    std::size_t p = 0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        if (p < pivots.size() && pivots[p] == c) {
            ++p;
        } else {
            out.push_back(c);
        }
    }
    return out;
}

/// Unique z with Xz = b and z_i = 0 for every i in `zeroed`.
/// Throws std::domain_error if no such z exists or it is not unique.
inline BitVector solve_underdetermined(const BitMatrix& x, const BitVector& b, std::span<const std::size_t> zeroed) {
    if (b.size() != x.rows()) throw DimensionMismatch("right-hand side length");
    std::vector<bool> fixed(x.cols(), false);
    for (std::size_t i : zeroed) {
        if (i >= x.cols()) throw std::out_of_range("zeroed index out of range");
        fixed[i] = true;
    }
    std::vector<std::size_t> unknowns;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        if (!fixed[c]) unknowns.push_back(c);
    }
    std::vector<BitVector> rows;
    std::vector<BitVector> rhs;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        BitVector reduced(unknowns.size());
        for (std::size_t k = 0; k < unknowns.size(); ++k) {
            if (x(r, unknowns[k])) reduced.set(k);
        }
        rows.push_back(std::move(reduced));
        rhs.push_back(BitVector(1));
        if (b[r]) rhs.back().set(0);
    }
    const auto pivots = detail::rref_in_place(rows, unknowns.size(), &rhs);
    for (std::size_t r = pivots.size(); r < rows.size(); ++r) {
        if (rhs[r][0]) throw std::domain_error("inconsistent system");
    }
    if (pivots.size() != unknowns.size()) throw std::domain_error("system not determined by the zeroed variables");
    BitVector z(x.cols());
    for (std::size_t r = 0; r < pivots.size(); ++r) {
        if (rhs[r][0]) z.set(unknowns[pivots[r]]);
    }
    return z;
}

/// Smallest k with 2^k >= n (0 for n <= 1).
constexpr std::size_t ceil_log2(std::size_t n) noexcept {
    std::size_t k = 0;
    while ((std::size_t{1} << k) < n) ++k;
    return k;
}

/// Largest k with 2^k <= n; n must be positive.
constexpr std::size_t floor_log2(std::size_t n) noexcept {
    std::size_t k = 0;
    while ((n >> (k + 1)) != 0) ++k;
    return k;
}

}  // namespace uso
