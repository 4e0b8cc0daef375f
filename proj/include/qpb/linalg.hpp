#pragma once

// Sparse exact linear algebra over Q(q).

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "qpb/scalar.hpp"

namespace qpb {

/// Sparse vector: entries sorted by index, no zero coefficients.
using SparseVec = std::vector<std::pair<int, Scalar>>;

SparseVec sv_from_map(const std::map<int, Scalar>& m);
SparseVec sv_unit(int index, const Scalar& c = Scalar(1));
/// a + s*b
SparseVec sv_axpy(const SparseVec& a, const Scalar& s, const SparseVec& b);
SparseVec sv_scale(const SparseVec& a, const Scalar& s);
Scalar sv_get(const SparseVec& a, int index);

/// Incremental echelon basis. Pivots are chosen at the highest index of each
/// row, so the non-pivot indices of the final basis are the smallest ones.
class RowReducer {
   public:
    explicit RowReducer(bool track = false) : track_(track) {}

    /// Adds v (with tag `tag` when tracking); returns true if the rank grew.
    bool add(const SparseVec& v, int tag = -1);
    /// Full reduction of v modulo the current span.
    SparseVec reduce(const SparseVec& v) const;
    /// Reduction that also returns the combination c of added vectors such
    /// that v - reduce(v) = sum c_t * added_t (requires tracking).
    SparseVec reduce_tracked(const SparseVec& v, SparseVec& combo) const;
    bool contains(const SparseVec& v) const { return reduce(v).empty(); }

    int rank() const { return static_cast<int>(rows_.size()); }
    bool is_pivot(int index) const { return rows_.count(index) != 0; }
    std::vector<int> pivots() const;
    /// Combinations of added vectors that reduced to zero (requires tracking).
    const std::vector<SparseVec>& dependencies() const { return deps_; }
    /// Reduced echelon row with given pivot.
    const SparseVec& row(int pivot) const { return rows_.at(pivot); }

   private:
    bool track_;
    std::map<int, SparseVec> rows_;
    std::map<int, SparseVec> combos_;
    std::vector<SparseVec> deps_;
};

/// Basis of {c : sum_i c_i images[i] = 0}.
std::vector<SparseVec> kernel_of(const std::vector<SparseVec>& images);
/// Some x with sum_i x_i images[i] = target, if one exists.
std::optional<SparseVec> solve_combination(const std::vector<SparseVec>& images,
                                           const SparseVec& target);
/// Rank via Gauss-Jordan elimination.
int rank_of(const std::vector<SparseVec>& vectors);
/// Rank via fraction-free Bareiss elimination on a dense copy with cleared
/// denominators; an independent path used as an oracle.
int rank_bareiss(const std::vector<SparseVec>& vectors, int ncols);
/// Basis of the intersection of the spans of two families.
std::vector<SparseVec> intersect_spans(const std::vector<SparseVec>& a,
                                       const std::vector<SparseVec>& b);
bool same_span(const std::vector<SparseVec>& a, const std::vector<SparseVec>& b);

/// Column-major sparse matrix: col[j] is the image of the j-th basis vector.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<SparseVec> col;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), col(c) {}

    static Matrix identity(int n);
    static Matrix zero(int r, int c) { return Matrix(r, c); }

    SparseVec apply(const SparseVec& v) const;
    Scalar at(int i, int j) const { return sv_get(col[j], i); }
    void set(int i, int j, const Scalar& v);

    Matrix operator*(const Matrix& o) const;
    Matrix operator+(const Matrix& o) const;
    Matrix operator-(const Matrix& o) const;
    Matrix scaled(const Scalar& s) const;
    Matrix transpose() const;
    bool operator==(const Matrix& o) const;
    bool is_zero() const;

    int rank() const { return rank_of(col); }
    /// Basis of the kernel (as coordinate vectors in the domain).
    std::vector<SparseVec> kernel() const { return kernel_of(col); }
    std::optional<Matrix> inverse() const;
};

Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace qpb
