#pragma once

// Left-covariant first-order calculi Ψ_inv = ker(ε)/R inside a truncation window.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qpb/hopf.hpp"
#include "qpb/linalg.hpp"

namespace qpb {

struct WindowOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CalculusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Generators of a right ideal R ⊆ ker(ε).
struct IdealSpec {
    std::vector<AlgElement> generators;
    std::string mode = "right";
};

/// Normal words of degree ≤ d with index lookup; index 0 is the unit.
class Window {
   public:
    Window() = default;
    Window(const PresentationPtr& p, int degree);

    int degree() const { return degree_; }
    int size() const { return static_cast<int>(words_.size()); }
    const std::vector<Word>& words() const { return words_; }
    const Word& word(int i) const { return words_[i]; }
    std::optional<int> index(const Word& w) const;
    bool contains(const AlgElement& a) const;
    /// Coordinates of a; throws WindowOverflow when a leaves the window.
    SparseVec coords(const AlgElement& a) const;
    AlgElement element(const SparseVec& v) const;

   private:
    PresentationPtr p_;
    int degree_ = 0;
    std::vector<Word> words_;
    std::map<Word, int, WordLess> index_;
};

/// Span of the right-ideal closure of the generators inside a window.
class IdealSpan {
   public:
    IdealSpan(const HopfStructure& h, const IdealSpec& spec, const Window& w);

    const Window& window() const { return w_; }
    const RowReducer& reducer() const { return rr_; }
    int dim() const { return rr_.rank(); }
    bool contains(const AlgElement& a) const;
    /// Basis elements of R ∩ window.
    std::vector<AlgElement> basis() const;
    /// Dimension of (ker ε ∩ window) / (R ∩ window).
    int quotient_dim() const { return w_.size() - 1 - dim(); }

   private:
    Window w_;
    RowReducer rr_;
    std::vector<SparseVec> basis_;
};

/// Ψ_inv with basis e_i = π(rep_i); all structure maps realized as tables.
class InvariantFormSpace {
   public:
    /// Builds the calculus for the ideal in the window of degree `degree`;
    /// projections are computed one degree higher so that products of
    /// representatives with generators stay inside.
    InvariantFormSpace(HopfPtr h, IdealSpec ideal, int degree);

    const HopfPtr& hopf() const { return h_; }
    const IdealSpec& ideal_spec() const { return spec_; }
    int window_degree() const { return degree_; }
    int dim() const { return static_cast<int>(reps_.size()); }
    bool stabilized() const { return dim_at_degree_ == dim_above_; }
    int dim_at_degree() const { return dim_at_degree_; }
    int dim_one_above() const { return dim_above_; }
    const IdealSpan& ideal() const { return *ideal_; }
    const Window& window() const { return ideal_->window(); }

    const Word& rep_word(int i) const { return reps_[i]; }
    /// rep_i − ε(rep_i)1, an element of ker ε projecting to e_i.
    AlgElement rep(int i) const;
    std::string basis_label(int i) const;

    /// π(a) for a in the working window.
    SparseVec project(const AlgElement& a) const;
    /// Lift of a quotient element to ker ε (combination of representatives).
    AlgElement lift(const SparseVec& v) const;

    /// False when representatives times generators leave the working window.
    bool circ_available() const { return circ_overflow_.empty(); }
    const std::string& circ_overflow() const { return circ_overflow_; }
    /// Matrix of ϑ ↦ ϑ∘x for a generator x.
    const Matrix& circ_generator(int gen) const { return circ_gen_[gen]; }
    /// Matrix of ϑ ↦ ϑ∘a, extended multiplicatively from generators.
    Matrix circ_matrix(const AlgElement& a) const;
    Matrix circ_word(const Word& w) const;
    SparseVec circ(const SparseVec& theta, const AlgElement& a) const;
    /// Direct formula π(rep·a) − ε(rep)π(a) for basis element i.
    SparseVec circ_direct(int i, const AlgElement& a) const;

    /// ϖ(e_i) = Σ_k e_k ⊗ c_ki, returned as the map k ↦ c_ki.
    const std::map<int, AlgElement>& varpi(int i) const { return varpi_[i]; }
    bool bicovariant() const { return bicovariant_; }
    const std::string& bicovariance_witness() const { return bicov_witness_; }

    SparseVec star(const SparseVec& theta) const;
    const Matrix& star_matrix() const { return star_; }
    bool star_compatible() const { return star_ok_; }
    const std::string& star_witness() const { return star_witness_; }

    /// Right-multiplication check of the ∘ tables against the algebra relations.
    bool circ_respects_relations(std::string* witness = nullptr) const;

   private:
    HopfPtr h_;
    IdealSpec spec_;
    int degree_;
    int dim_at_degree_ = 0;
    int dim_above_ = 0;
    std::unique_ptr<IdealSpan> ideal_;
    std::vector<Word> reps_;
    std::map<int, int> rep_of_index_;
    std::vector<Matrix> circ_gen_;
    std::string circ_overflow_;
    std::vector<std::map<int, AlgElement>> varpi_;
    bool bicovariant_ = true;
    std::string bicov_witness_;
    Matrix star_;
    bool star_ok_ = true;
    std::string star_witness_;
};

using CalculusPtr = std::shared_ptr<const InvariantFormSpace>;

/// ad(R ∩ window) ⊆ R ⊗ 𝒜, κ(R ∩ window)* = R ∩ window, ∘ and ϖ laws.
Report verify_calculus_covariance(const InvariantFormSpace& s);

/// An ε-derivation X given by its values on generators; X(x1…xn) = Σ_i X(x_i) Π_{j≠i} ε(x_j).
struct EpsDerivation {
    std::vector<Scalar> values;
    Scalar apply(const HopfStructure& h, const AlgElement& a) const;
    Scalar apply_word(const HopfStructure& h, const Word& w) const;
};

/// Checks X(ab) = ε(a)X(b) + X(a)ε(b) on window pairs.
bool verify_eps_derivation(const HopfStructure& h, const EpsDerivation& x, int degree,
                           std::string* witness = nullptr);

/// Basis of {a ∈ ker ε ∩ window : (X⊗id)ad(a) = 0 for every X}.
IdealSpec classical_ideal(const HopfStructure& h, const std::vector<EpsDerivation>& xs, int degree);

/// Basis of ker ε ∩ window (words w − ε(w)1).
IdealSpec counit_kernel(const HopfStructure& h, int degree);

}  // namespace qpb
