#pragma once

// Braided flip σ on Ψ_inv⊗Ψ_inv, its permutation operators σ_π, the
// antisymmetrizers A_n, A_kl, and the envelope algebras of Ψ_inv.

#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpb/fodc.hpp"

namespace qpb {

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BraidError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Degree budget for factorial-size sums; QPB_BUDGET overrides the default 5.
int antisymmetrizer_budget();

/// perm[i] is the image of position i.
using Perm = std::vector<int>;

Perm perm_identity(int n);
Perm perm_compose(const Perm& a, const Perm& b);  ///< (a∘b)(i) = a(b(i))
Perm perm_inverse(const Perm& p);
int perm_sign(const Perm& p);
int perm_length(const Perm& p);
std::vector<Perm> all_perms(int n);
/// (k,l)-shuffles: increasing on {0..k-1} and on {k..k+l-1}.
std::vector<Perm> shuffles(int k, int l);
/// Letters i (transposition of positions i, i+1) with p = s_{w[0]}∘s_{w[1]}∘…,
/// found by repeatedly removing the first descent.
std::vector<int> reduced_word(const Perm& p);
/// Same, removing a uniformly chosen descent each time.
std::vector<int> random_reduced_word(const Perm& p, std::mt19937_64& rng);

/// Flattened index of a multi-index over a basis of size d (first leg most significant).
int flat_index(const std::vector<int>& multi, int d);
std::vector<int> multi_index(int flat, int d, int n);
int ipow(int base, int exp);

class BraidOperator {
   public:
    /// σ(e_i⊗e_j) = Σ_k e_k ⊗ (e_i∘c_kj), where ϖ(e_j) = Σ_k e_k⊗c_kj.
    explicit BraidOperator(CalculusPtr s);
    /// Arbitrary matrix on a d²-dimensional space (used for negative controls).
    BraidOperator(int d, Matrix sigma);

    int dim() const { return d_; }
    const Matrix& matrix() const { return sigma_; }
    const CalculusPtr& calculus() const { return s_; }
    SparseVec apply(const SparseVec& t) const { return sigma_.apply(t); }

    /// id^{⊗i} ⊗ σ ⊗ id^{⊗(n-i-2)} on Ψ_inv^{⊗n}.
    Matrix letter(int i, int n) const;
    /// σ_{w[0]} σ_{w[1]} … on Ψ_inv^{⊗n}.
    Matrix word_matrix(const std::vector<int>& w, int n) const;
    /// σ_π through the bubble-sort reduced word; refuses when the braid relation fails.
    Matrix sigma_perm(const Perm& p) const;

    bool braid_relation(std::string* witness = nullptr) const;

   private:
    CalculusPtr s_;
    int d_;
    Matrix sigma_;
    mutable std::mutex mu_;
    mutable int braid_ok_ = -1;
    mutable std::map<std::pair<int, int>, Matrix> letters_;
};

using BraidPtr = std::shared_ptr<const BraidOperator>;

/// σ evaluated element by element from π(rep·c) − ε(rep)π(c) and a freshly
/// expanded adjoint action (independent of the stored ∘ and ϖ tables).
Matrix sigma_direct(const InvariantFormSpace& s);

class Antisymmetrizers {
   public:
    explicit Antisymmetrizers(BraidPtr b, int budget = antisymmetrizer_budget());

    const BraidPtr& braid() const { return b_; }
    int budget() const { return budget_; }

    /// A_n = Σ_{π∈S_n} (−1)^π σ_π.
    Matrix total(int n) const;
    /// A_kl = Σ_{π (k,l)-shuffle} (−1)^π σ_{π⁻¹}.
    Matrix shuffle(int k, int l) const;
    /// A_n assembled from randomly chosen reduced words (oracle path).
    Matrix total_bruteforce(int n, std::mt19937_64& rng) const;

    /// rank A_n, the degree-n dimension of the exterior envelope.
    int exterior_dim(int n) const;
    /// Basis of ker A_n.
    std::vector<SparseVec> kernel(int n) const;

   private:
    void check_budget(int n) const;
    const std::map<Perm, Matrix>& perm_matrices(int n) const;

    BraidPtr b_;
    int budget_;
    mutable std::mutex mu_;
    mutable std::map<int, std::map<Perm, Matrix>> perms_;
    mutable std::map<int, Matrix> total_;
    mutable std::map<int, int> rank_;
};

/// Identity checks on a braid operator: braid relation, invertibility,
/// factorization A_{k+l} = (A_k⊗A_l)A_kl for k+l ≤ n_max, independence of
/// the reduced word, and (when built from a calculus) ϖ- and *-compatibility.
Report verify_braid_identities(const BraidOperator& b, int n_max, unsigned long long seed = 1);

enum class EnvelopeVariant { tensor, wedge, vee };

const char* variant_name(EnvelopeVariant v);
EnvelopeVariant parse_variant(const std::string& s);

/// Graded quotient of the tensor algebra over Ψ_inv up to a maximal degree:
/// no relations (tensor), the quadratic relations Q = {π(a^(1))⊗π(a^(2)) : a ∈ R}
/// (wedge), or ker A_n in each degree (vee). Elements of degree n are
/// sparse vectors over flattened multi-indices, kept reduced modulo the relations.
class Envelope {
   public:
    Envelope(CalculusPtr s, EnvelopeVariant v, int max_degree);

    const CalculusPtr& calculus() const { return s_; }
    EnvelopeVariant variant() const { return v_; }
    int max_degree() const { return max_; }
    int dim() const { return d_; }
    int tensor_dim(int n) const { return ipow(d_, n); }

    /// Spanning set of the degree-2 relations of the wedge variant.
    const std::vector<SparseVec>& quadratic_relations() const { return q_; }
    int relation_dim(int n) const { return rel_.at(n).rank(); }
    int quotient_dim(int n) const { return tensor_dim(n) - relation_dim(n); }
    /// Echelon rows spanning the relations in degree n.
    std::vector<SparseVec> relations(int n) const;
    /// Flattened multi-indices forming the quotient basis in degree n.
    std::vector<int> basis(int n) const;
    /// Relation span in degree n enumerated directly from products x⊗r⊗y
    /// (wedge) or from the kernel of A_n (vee); oracle for relation_dim.
    int relation_dim_bruteforce(int n) const;

    SparseVec reduce(int n, const SparseVec& v) const;
    bool is_relation(int n, const SparseVec& v) const { return reduce(n, v).empty(); }
    /// Product of reduced elements of degrees n and m.
    SparseVec multiply(int n, const SparseVec& a, int m, const SparseVec& b) const;
    /// ϑ∘a in degree n, with (ϑ1⊗…⊗ϑn)∘a = Σ ϑ1∘a^(1) ⊗ … ⊗ ϑn∘a^(n).
    SparseVec circ(int n, const SparseVec& v, const AlgElement& a) const;
    Matrix circ_matrix(int n, const AlgElement& a) const;
    /// Graded antimultiplicative extension of the star on Ψ_inv.
    SparseVec star(int n, const SparseVec& v) const;
    /// ϖ on degree n: Σ over legs of ϑ1_k⊗…⊗ϑn_l ⊗ c_k…c_l, keyed by 𝒜 word.
    std::map<Word, SparseVec, WordLess> varpi(int n, const SparseVec& v) const;
    /// Antiderivation with d(π(a)) = −π(a^(1))⊗π(a^(2)); degree n → n+1.
    SparseVec differential(int n, const SparseVec& v) const;
    /// The same map on tensors, before reduction.
    const Matrix& differential_matrix(int n) const;
    const SparseVec& d_generator(int i) const { return d1_[i]; }

    /// Relations map into relations under d (degrees < max), ∘ and *; the
    /// relations form a two-sided ideal; d² = 0 modulo relations.
    Report verify(int window_degree) const;
    bool d_stable(std::string* witness = nullptr) const;

    std::string label(int n, int flat) const;
    std::string str(int n, const SparseVec& v) const;

   private:
    const Matrix& circ_gen(int n, int gen) const;

    CalculusPtr s_;
    EnvelopeVariant v_;
    int max_;
    int d_;
    std::vector<SparseVec> q_;
    std::vector<RowReducer> rel_;
    std::vector<SparseVec> d1_;
    std::unique_ptr<Antisymmetrizers> anti_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<int, int>, Matrix> circ_gen_;
    mutable std::map<int, Matrix> dmat_;
};

using EnvelopePtr = std::shared_ptr<const Envelope>;

/// Rank comparison showing the degreewise surjection wedge → vee: the
/// wedge relations lie in the vee relations and the induced map on
/// quotient bases has full rank.
Report verify_wedge_to_vee(const Envelope& wedge, const Envelope& vee);

}  // namespace qpb
