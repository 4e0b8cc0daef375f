#pragma once

// Hopf *-algebra structure maps on a presented algebra.

#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "qpb/algebra.hpp"
#include "qpb/report.hpp"

namespace qpb {

class HopfStructure {
   public:
    /// Tables are indexed by generator: coproduct[g] is φ(g) (two legs),
    /// counit[g] is ε(g), antipode[g] is κ(g).
    HopfStructure(std::string name, PresentationPtr algebra, std::vector<TensorElement> coproduct,
                  std::vector<Scalar> counit, std::vector<AlgElement> antipode);

    const std::string& name() const { return name_; }
    const PresentationPtr& algebra() const { return alg_; }
    const std::vector<TensorElement>& coproduct_table() const { return cop_; }
    const std::vector<Scalar>& counit_table() const { return eps_; }
    const std::vector<AlgElement>& antipode_table() const { return kappa_; }

    AlgElement unit() const { return AlgElement::unit(alg_); }
    AlgElement element(const std::string& word_text) const { return AlgElement::parse(alg_, word_text); }

    /// Images of a (not necessarily normal) word, as products of generator images.
    const TensorElement& coproduct_word(const Word& w) const;
    Scalar counit_word(const Word& w) const;
    const AlgElement& antipode_word(const Word& w) const;

    TensorElement coproduct(const AlgElement& a) const;
    /// n-fold iterated coproduct with n+1 legs, built by expanding the last leg.
    TensorElement coproduct_iterate(const AlgElement& a, int n) const;
    /// n-fold iterated coproduct built by expanding the first leg (oracle path).
    TensorElement coproduct_iterate_left(const AlgElement& a, int n) const;
    Scalar counit(const AlgElement& a) const;
    AlgElement antipode(const AlgElement& a) const;
    /// ad(a) = a^(2) ⊗ κ(a^(1)) a^(3).
    TensorElement adjoint_action(const AlgElement& a) const;
    const TensorElement& adjoint_word(const Word& w) const;

    /// Leg maps for use with map_leg.
    TensorElement coproduct_leg(const Word& w) const { return coproduct_word(w); }
    TensorElement counit_leg(const Word& w) const { return from_scalar(counit_word(w)); }
    TensorElement antipode_leg(const Word& w) const { return from_alg(antipode_word(w)); }

    /// Applies φ, ε or κ to one leg of a tensor over this algebra.
    TensorElement apply_coproduct(const TensorElement& t, int leg) const;
    TensorElement apply_counit(const TensorElement& t, int leg) const;
    TensorElement apply_antipode(const TensorElement& t, int leg) const;

    std::vector<Word> window(int d) const { return alg_->window(d); }

   private:
    std::string name_;
    PresentationPtr alg_;
    std::vector<TensorElement> cop_;
    std::vector<Scalar> eps_;
    std::vector<AlgElement> kappa_;

    mutable std::mutex mu_;
    mutable std::unordered_map<Word, TensorElement> cop_cache_;
    mutable std::unordered_map<Word, AlgElement> kappa_cache_;
    mutable std::unordered_map<Word, TensorElement> ad_cache_;
};

using HopfPtr = std::shared_ptr<const HopfStructure>;

/// Coassociativity, counit and antipode laws, *-compatibilities and
/// consistency of the tables with every rewrite rule, over the window.
Report verify_hopf_axioms(const HopfStructure& h, int window_degree);

/// Right-coaction laws of ad over the window.
Report verify_adjoint_coaction(const HopfStructure& h, int window_degree);

}  // namespace qpb
