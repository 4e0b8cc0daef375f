#include "qpb/linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace qpb {

SparseVec sv_from_map(const std::map<int, Scalar>& m) {
    SparseVec v;
    v.reserve(m.size());
    for (const auto& [i, c] : m)
        if (!c.is_zero()) v.emplace_back(i, c);
    return v;
}

SparseVec sv_unit(int index, const Scalar& c) {
    if (c.is_zero()) return {};
    return {{index, c}};
}

SparseVec sv_axpy(const SparseVec& a, const Scalar& s, const SparseVec& b) {
    if (s.is_zero() || b.empty()) return a;
    SparseVec r;
    r.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            r.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            r.emplace_back(b[j].first, s * b[j].second);
            ++j;
        } else {
            Scalar c = a[i].second + s * b[j].second;
            if (!c.is_zero()) r.emplace_back(a[i].first, std::move(c));
            ++i;
            ++j;
        }
    }
    return r;
}

SparseVec sv_scale(const SparseVec& a, const Scalar& s) {
    if (s.is_zero()) return {};
    SparseVec r = a;
    for (auto& e : r) e.second *= s;
    return r;
}

Scalar sv_get(const SparseVec& a, int index) {
    auto it = std::lower_bound(a.begin(), a.end(), index,
                               [](const auto& e, int k) { return e.first < k; });
    if (it != a.end() && it->first == index) return it->second;
    return Scalar(0);
}

namespace {

// Eliminates every pivot index from v, scanning from the top index down.
// Each pivot row only has entries at or below its pivot, so one pass suffices.
SparseVec reduce_impl(const std::map<int, SparseVec>& rows,
                      const std::map<int, SparseVec>* combos, SparseVec v, SparseVec* combo) {
    if (rows.empty()) return v;
    int pos = static_cast<int>(v.size()) - 1;
    while (pos >= 0) {
        int idx = v[pos].first;
        auto it = rows.find(idx);
        if (it == rows.end()) {
            --pos;
            continue;
        }
        Scalar c = v[pos].second;
        v = sv_axpy(v, -c, it->second);
        if (combo) *combo = sv_axpy(*combo, -c, combos->at(idx));
        // The entry at idx vanished; everything above is untouched.
        auto lb = std::lower_bound(v.begin(), v.end(), idx,
                                   [](const auto& e, int k) { return e.first < k; });
        pos = static_cast<int>(lb - v.begin()) - 1;
    }
    return v;
}

}  // namespace

SparseVec RowReducer::reduce(const SparseVec& v) const {
    return reduce_impl(rows_, nullptr, v, nullptr);
}

SparseVec RowReducer::reduce_tracked(const SparseVec& v, SparseVec& combo) const {
    if (!track_) throw std::logic_error("RowReducer: tracking disabled");
    SparseVec c;
    SparseVec r = reduce_impl(rows_, &combos_, v, &c);
    combo = sv_scale(c, Scalar(-1));
    return r;
}

bool RowReducer::add(const SparseVec& v, int tag) {
    SparseVec combo;
    if (track_) combo = sv_unit(tag);
    SparseVec r = reduce_impl(rows_, track_ ? &combos_ : nullptr, v, track_ ? &combo : nullptr);
    if (r.empty()) {
        if (track_) deps_.push_back(std::move(combo));
        return false;
    }
    Scalar inv = r.back().second.inverse();
    int piv = r.back().first;
    rows_[piv] = sv_scale(r, inv);
    if (track_) combos_[piv] = sv_scale(combo, inv);
    return true;
}

std::vector<int> RowReducer::pivots() const {
    std::vector<int> p;
    for (const auto& kv : rows_) p.push_back(kv.first);
    return p;
}

std::vector<SparseVec> kernel_of(const std::vector<SparseVec>& images) {
    RowReducer rr(true);
    for (size_t i = 0; i < images.size(); ++i) rr.add(images[i], static_cast<int>(i));
    return rr.dependencies();
}

std::optional<SparseVec> solve_combination(const std::vector<SparseVec>& images,
                                           const SparseVec& target) {
    RowReducer rr(true);
    for (size_t i = 0; i < images.size(); ++i) rr.add(images[i], static_cast<int>(i));
    SparseVec combo;
    SparseVec rest = rr.reduce_tracked(target, combo);
    if (!rest.empty()) return std::nullopt;
    return combo;
}

int rank_of(const std::vector<SparseVec>& vectors) {
    RowReducer rr;
    for (const auto& v : vectors) rr.add(v);
    return rr.rank();
}

namespace {

Poly poly_lcm(const Poly& a, const Poly& b) {
    Poly g = Poly::gcd(a, b);
    Poly qt, r;
    Poly::divmod(a * b, g, qt, r);
    return qt.monic();
}

}  // namespace

int rank_bareiss(const std::vector<SparseVec>& vectors, int ncols) {
    const int nrows = static_cast<int>(vectors.size());
    std::vector<std::vector<Scalar>> m(nrows, std::vector<Scalar>(ncols));
    for (int i = 0; i < nrows; ++i) {
        Poly l(Rational(1));
        mpz_class zl = 1;
        for (const auto& [j, c] : vectors[i]) {
            if (j < 0 || j >= ncols) throw std::out_of_range("rank_bareiss: column index");
            if (!c.den().is_one()) l = poly_lcm(l, c.den());
            for (const auto& k : c.num().coeffs()) zl = lcm(zl, mpz_class(k.get_den()));
        }
        Scalar clear = Scalar(l) * Scalar(Rational(zl));
        for (const auto& [j, c] : vectors[i]) m[i][j] = c * clear;
    }
    int rank = 0;
    Scalar prev(1);
    for (int col = 0; col < ncols && rank < nrows; ++col) {
        int p = -1;
        for (int i = rank; i < nrows; ++i)
            if (!m[i][col].is_zero()) {
                p = i;
                break;
            }
        if (p < 0) continue;
        std::swap(m[p], m[rank]);
        const Scalar piv = m[rank][col];
        for (int i = rank + 1; i < nrows; ++i) {
            const Scalar f = m[i][col];
            for (int j = col + 1; j < ncols; ++j) {
                Scalar x = piv * m[i][j] - f * m[rank][j];
                m[i][j] = prev.is_one() ? x : x / prev;
            }
            m[i][col] = Scalar(0);
        }
        prev = piv;
        ++rank;
    }
    return rank;
}

std::vector<SparseVec> intersect_spans(const std::vector<SparseVec>& a,
                                       const std::vector<SparseVec>& b) {
    // x in span(a) ∩ span(b)  <=>  sum s_i a_i - sum t_j b_j = 0.
    std::vector<SparseVec> all = a;
    for (const auto& v : b) all.push_back(sv_scale(v, Scalar(-1)));
    RowReducer basis;
    std::vector<SparseVec> out;
    for (const auto& c : kernel_of(all)) {
        SparseVec x;
        for (const auto& [i, s] : c)
            if (i < static_cast<int>(a.size())) x = sv_axpy(x, s, a[i]);
        if (basis.add(x)) out.push_back(x);
    }
    return out;
}

bool same_span(const std::vector<SparseVec>& a, const std::vector<SparseVec>& b) {
    RowReducer ra, rb;
    for (const auto& v : a) ra.add(v);
    for (const auto& v : b) rb.add(v);
    if (ra.rank() != rb.rank()) return false;
    for (const auto& v : a)
        if (!rb.contains(v)) return false;
    return true;
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.col[i] = sv_unit(i);
    return m;
}

SparseVec Matrix::apply(const SparseVec& v) const {
    std::map<int, Scalar> acc;
    for (const auto& [j, c] : v) {
        if (j < 0 || j >= cols) throw std::out_of_range("Matrix::apply index");
        for (const auto& [i, x] : col[j]) acc[i] += c * x;
    }
    return sv_from_map(acc);
}

void Matrix::set(int i, int j, const Scalar& v) {
    std::map<int, Scalar> m(col[j].begin(), col[j].end());
    m[i] = v;
    col[j] = sv_from_map(m);
}

Matrix Matrix::operator*(const Matrix& o) const {
    if (cols != o.rows) throw std::invalid_argument("Matrix product: shape mismatch");
    Matrix r(rows, o.cols);
    for (int j = 0; j < o.cols; ++j) r.col[j] = apply(o.col[j]);
    return r;
}

Matrix Matrix::operator+(const Matrix& o) const {
    if (rows != o.rows || cols != o.cols) throw std::invalid_argument("Matrix sum: shape mismatch");
    Matrix r(rows, cols);
    for (int j = 0; j < cols; ++j) r.col[j] = sv_axpy(col[j], Scalar(1), o.col[j]);
    return r;
}

Matrix Matrix::operator-(const Matrix& o) const { return *this + o.scaled(Scalar(-1)); }

Matrix Matrix::scaled(const Scalar& s) const {
    Matrix r(rows, cols);
    for (int j = 0; j < cols; ++j) r.col[j] = sv_scale(col[j], s);
    return r;
}

Matrix Matrix::transpose() const {
    std::vector<std::map<int, Scalar>> t(rows);
    for (int j = 0; j < cols; ++j)
        for (const auto& [i, x] : col[j]) t[i][j] = x;
    Matrix r(cols, rows);
    for (int i = 0; i < rows; ++i) r.col[i] = sv_from_map(t[i]);
    return r;
}

bool Matrix::operator==(const Matrix& o) const {
    return rows == o.rows && cols == o.cols && col == o.col;
}

bool Matrix::is_zero() const {
    for (const auto& c : col)
        if (!c.empty()) return false;
    return true;
}

std::optional<Matrix> Matrix::inverse() const {
    if (rows != cols) return std::nullopt;
    Matrix r(rows, cols);
    for (int j = 0; j < cols; ++j) {
        auto x = solve_combination(col, sv_unit(j));
        if (!x) return std::nullopt;
        r.col[j] = *x;
    }
    return r;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix r(a.rows * b.rows, a.cols * b.cols);
    for (int i = 0; i < a.cols; ++i)
        for (int j = 0; j < b.cols; ++j) {
            SparseVec v;
            for (const auto& [p, x] : a.col[i])
                for (const auto& [s, y] : b.col[j]) v.emplace_back(p * b.rows + s, x * y);
            r.col[i * b.cols + j] = std::move(v);
        }
    return r;
}

}  // namespace qpb
