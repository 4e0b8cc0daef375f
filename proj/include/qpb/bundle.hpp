#pragma once

// Quantum principal bundles: horizontal forms with a coaction, base forms,
// preconnections, the natural maps ρ♮ and χ♮, and the ideals they annihilate.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qpb/fodc.hpp"

namespace qpb {

struct BundleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// hor_P as a graded presentation whose degree-0 part is ℬ, the structure
/// group G and the coaction F⋆ given on generators (legs hor_P ⊗ 𝒜).
class Bundle {
   public:
    Bundle(std::string name, HopfPtr G, PresentationPtr hor, std::vector<TensorElement> coaction,
           std::vector<AlgElement> base_generators = {}, std::vector<AlgElement> base_differential = {},
           std::vector<AlgElement> embedding = {});

    const std::string& name() const { return name_; }
    const HopfPtr& structure() const { return G_; }
    const PresentationPtr& hor() const { return hor_; }
    const PresentationPtr& algebra() const { return G_->algebra(); }
    const std::vector<TensorElement>& coaction_table() const { return coaction_; }
    /// Generators of Ω_M (as horizontal elements) and d_M on them.
    const std::vector<AlgElement>& base_generators() const { return base_; }
    const std::vector<AlgElement>& base_differential() const { return base_d_; }
    /// Image of the 𝒜 generators in ℬ for trivial bundles (empty otherwise).
    bool is_trivial() const { return !embedding_.empty(); }
    AlgElement embed(const AlgElement& a) const;
    /// Generator index of each base generator.
    const std::vector<int>& base_indices() const { return base_gen_; }

    const TensorElement& coact_word(const Word& w) const;
    TensorElement coact(const AlgElement& a) const;

    /// Horizontal normal words of length ≤ d (all grades) and those of grade g.
    std::vector<Word> window(int d) const { return hor_->window(d); }
    std::vector<Word> window_of_grade(int d, int grade) const;

   private:
    std::string name_;
    HopfPtr G_;
    PresentationPtr hor_;
    std::vector<TensorElement> coaction_;
    std::vector<AlgElement> base_;
    std::vector<AlgElement> base_d_;
    std::vector<AlgElement> embedding_;
    std::vector<int> base_gen_;
    mutable std::mutex mu_;
    mutable std::unordered_map<Word, TensorElement> cache_;
};

using BundlePtr = std::shared_ptr<const Bundle>;

/// (id⊗φ)F⋆ = (F⋆⊗id)F⋆, (id⊗ε)F⋆ = id, F⋆ a grade-preserving
/// *-homomorphism compatible with the relations, and d_M laws on Ω_M.
Report verify_bundle(const Bundle& b, int window_degree);

/// A linear map on hor_P given by values on generators and extended by the
/// graded Leibniz rule (sign (−1)^{degree·∂φ}); degree 1 for preconnections
/// and their differences, 2 for curvature-type derivations such as D².
class Derivation {
   public:
    Derivation() = default;
    Derivation(PresentationPtr p, std::vector<AlgElement> values, int degree, std::string label = {});

    const std::string& label() const { return label_; }
    int degree() const { return degree_; }
    const PresentationPtr& presentation() const { return p_; }
    const std::vector<AlgElement>& values() const { return values_; }

    AlgElement apply_word(const Word& w) const;
    AlgElement apply(const AlgElement& a) const;

    /// Generator values of the composite D∘D (an even derivation when D is odd).
    Derivation squared() const;
    Derivation operator+(const Derivation& o) const;
    Derivation operator-(const Derivation& o) const;
    Derivation scaled(const Scalar& s) const;
    /// (∗D∗ + D)/2.
    Derivation symmetrized() const;
    Derivation with_label(std::string l) const;

    /// Leibniz extension is compatible with every rewrite rule.
    bool respects_relations(std::string* witness = nullptr) const;

   private:
    PresentationPtr p_;
    std::vector<AlgElement> values_;
    int degree_ = 1;
    std::string label_;
    mutable std::shared_ptr<std::mutex> mu_ = std::make_shared<std::mutex>();
    mutable std::shared_ptr<std::unordered_map<Word, AlgElement>> cache_ =
        std::make_shared<std::unordered_map<Word, AlgElement>>();
};

/// d_M extended to hor_P by zero on the non-base generators; meaningful on Ω_M.
Derivation base_derivation(const Bundle& b);

/// Preconnection axioms: degree +1, right covariance, restriction to d_M on
/// Ω_M, Leibniz consistency with the relations, hermiticity. With
/// `difference` set, E(Ω_M) = 0 replaces the restriction condition.
Report verify_preconnection(const Bundle& b, const Derivation& d, int window_degree, bool difference = false);

/// Generator values of a preconnection on a trivial bundle hor_P = Ω_M⊗𝒜:
/// D = d_M on Ω_M and D(1⊗a) = Σ λ(a^(1))⊗a^(2), λ(a) = Σ_j X_j(a) ω_j.
Derivation trivial_preconnection(const Bundle& b, const std::vector<EpsDerivation>& xs,
                                 const std::vector<AlgElement>& forms, const std::string& label);

/// Σ_i q_i F(b_i) = 1⊗a with q_i, b_i degree-0 words of length ≤ max_length.
using WitnessPairs = std::vector<std::pair<AlgElement, AlgElement>>;
std::optional<WitnessPairs> freeness_witness(const Bundle& b, const AlgElement& a, int max_length);
bool check_witness(const Bundle& b, const AlgElement& a, const WitnessPairs& w);

/// Basis of the F⋆-invariant elements of the given grade among words of length ≤ d.
std::vector<AlgElement> base_invariants(const Bundle& b, int grade, int window_degree);
/// Products and stars of invariants stay invariant.
Report verify_base_invariants(const Bundle& b, int window_degree);

struct Multiplet {
    std::string label;
    std::vector<std::vector<AlgElement>> u;  ///< n×n matrix over 𝒜
    std::vector<std::vector<AlgElement>> b;  ///< rows k, columns j, entries in ℬ
};

struct MultipletTable {
    std::vector<Multiplet> classes;
};

/// Σ_k b*_ki F(b_kj) = 1⊗u_ij and F(b_kj) = Σ_n b_kn⊗u_nj.
Report verify_multiplets(const Bundle& b, const MultipletTable& m);

/// b_kj = ι(u_kj) for a trivial bundle and a list of unitary corepresentations.
MultipletTable trivial_bundle_multiplets(const Bundle& b,
                                         const std::vector<std::vector<std::vector<AlgElement>>>& us,
                                         const std::vector<std::string>& labels = {});
/// One-dimensional classes z^n, |n| ≤ range, of a trivial u1 bundle.
MultipletTable u1_multiplets(const Bundle& b, int range);

/// ν(u_ij) = −Σ_k b*_ki Δ(b_kj), extended linearly over the matrix
/// coefficients. With Δ = D² this is ρ♮_D, with Δ = E it is χ♮_E. Words
/// not spanned by the table fall back to freeness witnesses of length
/// ≤ witness_length (negative: no fallback, such words throw).
class NaturalMap {
   public:
    NaturalMap(BundlePtr b, Derivation delta, MultipletTable m, int witness_length = -1);

    const Derivation& delta() const { return delta_; }
    AlgElement value_word(const Word& w) const;
    AlgElement value(const AlgElement& a) const;
    /// Same value from a freeness witness: −Σ q_i Δ(b_i).
    AlgElement value_by_witness(const AlgElement& a, int max_length) const;

   private:
    BundlePtr b_;
    Derivation delta_;
    MultipletTable m_;
    std::vector<AlgElement> entries_;
    std::vector<AlgElement> entry_values_;
    int max_len_ = -1;
    int witness_length_ = -1;
    Window win_;
    RowReducer rr_{true};
    mutable std::shared_ptr<std::mutex> mu_ = std::make_shared<std::mutex>();
    mutable std::shared_ptr<std::unordered_map<Word, AlgElement>> cache_ =
        std::make_shared<std::unordered_map<Word, AlgElement>>();
};

NaturalMap rho_natural(BundlePtr b, const Derivation& D, const MultipletTable& m, int witness_length = -1);
NaturalMap chi_natural(BundlePtr b, const Derivation& E, const MultipletTable& m, int witness_length = -1);

/// Structural identities of ρ♮ and χ♮ for a preconnection D and a difference E over the
/// horizontal window of degree hor_degree and the 𝒜 window of degree alg_degree.
Report verify_preconnection_lemmas(BundlePtr b, const Derivation& D, const Derivation& E, const MultipletTable& m,
                                   int hor_degree, int alg_degree, int witness_length = -1);

struct IdealFamily {
    std::vector<AlgElement> r_d;               ///< ℛ_D ∩ window
    std::vector<std::vector<AlgElement>> p_e;  ///< 𝒫_E ∩ window per difference
    std::vector<AlgElement> hat;               ///< ℛ̂ ∩ window
    Report checks;
    IdealSpec spec() const { return IdealSpec{hat, "right"}; }
};

/// ℛ_D ∩ ⋂_E 𝒫_E over the 𝒜 window, with E ranging over the differences of
/// the family to its first member and over the explicit differences.
IdealFamily hat_R(BundlePtr b, const std::vector<Derivation>& preconnections, const std::vector<Derivation>& deltas,
                  const MultipletTable& m, int alg_degree, int witness_length = -1);

/// Shipped bundles: the trivial bundle over an augmented two-point base
/// (Ω_M generated by a central idempotent e and odd θ, η with d_M θ = θη),
/// and the q-Hopf fibration ℬ = su_q_2, G = u1.
BundlePtr make_trivial_bundle(HopfPtr G);
BundlePtr make_hopf_fibration();
/// The anti-hermitian one-forms θ and eθ of the trivial bundle.
std::vector<AlgElement> trivial_bundle_forms(const Bundle& b);
/// Classes 0, ±1 of the Hopf fibration: b = (1), (α, γ), (α*, qγ*).
MultipletTable hopf_fibration_multiplets(const Bundle& b);

}  // namespace qpb
