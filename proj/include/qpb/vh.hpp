#pragma once

// The vertical-horizontal algebra vh_P = hor_P ⊗ Ψ_inv^∧ (or ⊗ Ψ_inv^∨, or the
// tensor algebra), its differentials ∂_D, gauge maps h_E, charts of Ω_P, F̂
// and the connection of a chart.

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "qpb/braided.hpp"
#include "qpb/bundle.hpp"

namespace qpb {

struct VHError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Basis key φ⊗ϑ: a normal horizontal word and a flattened multi-index of
/// envelope degree n (a quotient basis index after reduction).
struct VHKey {
    Word hor;
    int n = 0;
    int flat = 0;
    bool operator<(const VHKey& o) const {
        if (hor != o.hor) return WordLess{}(hor, o.hor);
        if (n != o.n) return n < o.n;
        return flat < o.flat;
    }
    bool operator==(const VHKey& o) const { return hor == o.hor && n == o.n && flat == o.flat; }
};

struct VHElement {
    std::map<VHKey, Scalar> terms;

    bool is_zero() const { return terms.empty(); }
    VHElement operator-() const;
    VHElement& operator+=(const VHElement& o);
    VHElement& operator-=(const VHElement& o);
    friend VHElement operator+(VHElement a, const VHElement& b) { return a += b; }
    friend VHElement operator-(VHElement a, const VHElement& b) { return a -= b; }
    friend VHElement operator*(const Scalar& s, const VHElement& a);
    friend bool operator==(const VHElement& a, const VHElement& b) { return a.terms == b.terms; }
};

class VHAlgebra {
   public:
    VHAlgebra(BundlePtr b, EnvelopePtr env);

    const BundlePtr& bundle() const { return b_; }
    const EnvelopePtr& envelope() const { return env_; }
    const CalculusPtr& calculus() const { return env_->calculus(); }
    EnvelopeVariant variant() const { return env_->variant(); }
    int max_degree() const { return env_->max_degree(); }
    int dim() const { return env_->dim(); }

    VHElement one() const;
    VHElement hor(const AlgElement& phi) const;
    /// 1⊗v for a tensor v of degree n, reduced modulo the envelope relations.
    VHElement vert(int n, const SparseVec& v) const;
    /// 1⊗e_i.
    VHElement gen(int i) const { return vert(1, sv_unit(i)); }
    VHElement pure(const AlgElement& phi, int n, const SparseVec& v) const;
    /// Basis element of a key.
    VHElement element(const VHKey& k) const;

    /// Envelope reduction and product; degrees above the envelope give zero
    /// when the envelope vanishes there and raise VHError otherwise.
    SparseVec env_reduce(int n, const SparseVec& v) const;
    SparseVec env_multiply(int n, const SparseVec& a, int m, const SparseVec& b) const;
    /// ϑ∘c for the basis element ϑ = (n, flat) and an 𝒜 word c.
    const SparseVec& circ_basis(int n, int flat, const Word& c) const;

    /// (ψ⊗η)(φ⊗ϑ) = (−1)^{∂η∂φ} Σ ψφ_k ⊗ (η∘c_k)ϑ.
    VHElement multiply(const VHElement& x, const VHElement& y) const;
    /// (φ⊗ϑ)* = Σ φ_k* ⊗ (ϑ*∘c_k*).
    VHElement star(const VHElement& x) const;

    int grade(const VHKey& k) const { return b_->hor()->word_grade(k.hor) + k.n; }
    /// Homogeneous total grade, -1 for mixed elements.
    int grade(const VHElement& x) const;
    /// Horizontal part (envelope degree 0) as an element of hor_P.
    AlgElement horizontal_part(const VHElement& x) const;

    /// Basis keys with horizontal words of length ≤ hor_degree and envelope
    /// degree ≤ env_degree.
    std::vector<VHKey> window(int hor_degree, int env_degree) const;

    std::string str(const VHElement& x) const;
    bool vanishes_above() const { return vanish_; }

   private:
    void accumulate(VHElement& out, const Terms& hor, int n, const SparseVec& v, const Scalar& c) const;


    BundlePtr b_;
    EnvelopePtr env_;
    bool vanish_ = false;
    mutable std::mutex mu_;
    mutable std::map<std::tuple<int, int, Word>, SparseVec> circ_cache_;
};

using VHPtr = std::shared_ptr<const VHAlgebra>;

/// ϑ ↦ Σ_k c_k·ν(rep_k) for the calculus basis: the descent of a natural map.
std::vector<AlgElement> descend(const NaturalMap& nu, const InvariantFormSpace& s);
/// ν vanishes on the ideal basis of the calculus window.
bool descends(const NaturalMap& nu, const InvariantFormSpace& s, std::string* witness = nullptr);

/// ∂_D from D on hor_P and ρ_D on Ψ_inv, extended by the graded Leibniz rule
/// over the letters of a tensor representative.
class VHDifferential {
   public:
    VHDifferential(VHPtr vh, Derivation D, std::vector<AlgElement> rho);

    const Derivation& preconnection() const { return D_; }
    const std::vector<AlgElement>& curvature() const { return rho_; }
    /// ∂_D(φ⊗1) = Dφ⊗1 + (−1)^{∂φ} Σ φ_k⊗π(c_k).
    VHElement on_hor(const Word& w) const;
    /// ∂_D(1⊗e_i) = ρ_D(e_i)⊗1 + 1⊗d(e_i).
    VHElement on_gen(int i) const;
    VHElement apply(const VHElement& x) const;
    /// ∂_D(φ⊗v) for a raw tensor v (used on relation representatives).
    VHElement apply_raw(const Word& w, int n, const SparseVec& v) const;

   private:
    VHElement apply_key(const Word& w, int n, int flat) const;

    VHPtr vh_;
    Derivation D_;
    std::vector<AlgElement> rho_;
    mutable std::mutex mu_;
    mutable std::map<VHKey, VHElement> cache_;
};

/// h_E: identity on hor_P, e_i ↦ e_i − χ_E(e_i)⊗1, extended multiplicatively.
class GaugeMap {
   public:
    GaugeMap(VHPtr vh, std::vector<AlgElement> chi, std::string label = {});

    const std::vector<AlgElement>& chi() const { return chi_; }
    const std::string& label() const { return label_; }
    VHElement apply(const VHElement& x) const;
    VHElement apply_raw(const Word& w, int n, const SparseVec& v) const;

   private:
    VHPtr vh_;
    std::vector<AlgElement> chi_;
    std::string label_;
    mutable std::mutex mu_;
    mutable std::map<VHKey, VHElement> cache_;
};

/// An element of Ω_P in the chart of a family member.
struct GluedForm {
    int chart = 0;
    VHElement x;
};

/// A finite family of preconnections serving as charts of Ω_P.
class ChartFamily {
   public:
    ChartFamily(VHPtr vh, std::vector<Derivation> charts, MultipletTable m, int witness_length = -1);

    const VHPtr& vh() const { return vh_; }
    int size() const { return static_cast<int>(charts_.size()); }
    const Derivation& chart(int i) const { return charts_.at(i); }
    const VHDifferential& differential(int i) const { return *diffs_.at(i); }
    /// Gauge map of a difference E (χ_E built from the multiplet table).
    GaugeMap gauge(const Derivation& E) const;
    /// h_{D_j − D_i}.
    const GaugeMap& transition(int i, int j) const;

    GluedForm glue(const GluedForm& x, int target) const;
    /// d_P in the chart of x.
    GluedForm d(const GluedForm& x) const;
    GluedForm multiply(const GluedForm& x, const GluedForm& y) const;

    /// ρ♮_D and χ♮ of the chart differences vanish on the ideal of the calculus.
    Report verify_descent() const;

   private:
    VHPtr vh_;
    std::vector<Derivation> charts_;
    MultipletTable m_;
    int witness_length_;
    std::vector<std::unique_ptr<VHDifferential>> diffs_;
    std::vector<std::vector<std::unique_ptr<GaugeMap>>> trans_;
};

/// Element of vh_P ⊗ Γ^∧ with Γ^∧ = 𝒜 ⊗ Ψ_inv^∧; key (vh key, 𝒜 word, degree, flat).
struct FKey {
    VHKey x;
    Word a;
    int m = 0;
    int flat = 0;
    bool operator<(const FKey& o) const {
        if (!(x == o.x)) return x < o.x;
        if (a != o.a) return WordLess{}(a, o.a);
        if (m != o.m) return m < o.m;
        return flat < o.flat;
    }
    bool operator==(const FKey& o) const { return x == o.x && a == o.a && m == o.m && flat == o.flat; }
};

struct FElement {
    std::map<FKey, Scalar> terms;
    bool is_zero() const { return terms.empty(); }
    friend bool operator==(const FElement& a, const FElement& b) { return a.terms == b.terms; }
};

/// F̂ in a chart: φ⊗ϑ ↦ F⋆(φ)ϖ̂(ϑ), ϖ̂(e_i) = ϖ(e_i) + 1⊗e_i.
class FHat {
   public:
    explicit FHat(VHPtr vh);

    FElement apply(const VHElement& x) const;
    FElement multiply(const FElement& x, const FElement& y) const;
    FElement add(const FElement& x, const FElement& y, const Scalar& s = Scalar(1)) const;
    /// (∂_D ⊗ id + (−1)^{∂} id ⊗ d) with d(a⊗ϑ) = a^(1)⊗π(a^(2))ϑ + a⊗dϑ.
    FElement differential(const VHDifferential& dd, const FElement& x) const;
    /// (h ⊗ id).
    FElement gauge(const GaugeMap& h, const FElement& x) const;
    /// Part of positive Γ-degree.
    FElement vertical_part(const FElement& x) const;

   private:
    FElement lift(const VHElement& x, const Word& a, int m, const SparseVec& v) const;
    FElement on_key(const VHKey& k) const;

    VHPtr vh_;
    mutable std::mutex mu_;
    mutable std::map<VHKey, FElement> cache_;
};

/// vh algebra laws over the window: associativity, star involution and
/// antimultiplicativity, the subalgebra embeddings and the commutation rule.
Report verify_vh_algebra(const VHAlgebra& vh, int hor_degree, int env_degree, unsigned long long seed = 1);

/// ∂_D: degree, graded Leibniz, hermiticity, ∂_D² = 0 on generators,
/// compatibility with the relations and with d_M on Ω_M.
Report verify_differential(const ChartFamily& f, int chart, int hor_degree, unsigned long long seed = 1);

/// h_0 = id, h_E h_W = h_{E+W}, hermiticity, multiplicativity, h_E∂_D = ∂_{D+E}h_E,
/// and compatibility with the relations of vh_P.
Report verify_gauge(const ChartFamily& f, int hor_degree, unsigned long long seed = 1);

/// Chart independence of d_P, products and F̂; F̂ a graded-differential
/// homomorphism on generators; the horizontality equality on the window.
Report verify_gluing(const ChartFamily& f, int hor_degree, unsigned long long seed = 1);

/// ω_D(ϑ) = (D, 1⊗ϑ) for every chart: regularity, multiplicativity on the
/// quadratic relations, D = D_ω recomputed in the other charts, and the
/// difference of two connections.
Report verify_connections(const ChartFamily& f, int hor_degree);

/// Exterior-algebra identities in ⨿_P = hor_P ⊗ Ψ_inv^⊗: the two closed
/// forms of h⋆_{−E} against the direct product, stability of hor⊗S^∨, and
/// h_E- and ∂_D-stability of Υ_P = hor⊗[S^∨]^∧ inside vh_P.
Report exterior_variant_suite(BundlePtr b, CalculusPtr s, const std::vector<Derivation>& charts,
                              const MultipletTable& m, int n_max, int hor_degree, int witness_length = -1);

}  // namespace qpb
