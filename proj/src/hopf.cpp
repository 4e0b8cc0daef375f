#include "qpb/hopf.hpp"

namespace qpb {

HopfStructure::HopfStructure(std::string name, PresentationPtr algebra,
                             std::vector<TensorElement> coproduct, std::vector<Scalar> counit,
                             std::vector<AlgElement> antipode)
    : name_(std::move(name)),
      alg_(std::move(algebra)),
      cop_(std::move(coproduct)),
      eps_(std::move(counit)),
      kappa_(std::move(antipode)) {
    const size_t n = alg_->generators().size();
    if (cop_.size() != n || eps_.size() != n || kappa_.size() != n)
        throw AlgebraError("Hopf tables of " + name_ + " do not cover every generator");
    for (const auto& t : cop_)
        if (t.degree() != 2) throw AlgebraError("coproduct table entry must have two legs");
}

const TensorElement& HopfStructure::coproduct_word(const Word& w) const {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = cop_cache_.find(w);
        if (it != cop_cache_.end()) return it->second;
    }
    TensorElement v;
    if (w.empty()) {
        v = TensorElement::unit({alg_, alg_});
    } else {
        const TensorElement& head = coproduct_word(w.substr(0, w.size() - 1));
        v = head * cop_[letter(w, w.size() - 1)];
    }
    std::lock_guard<std::mutex> lk(mu_);
    return cop_cache_.emplace(w, std::move(v)).first->second;
}

Scalar HopfStructure::counit_word(const Word& w) const {
    Scalar s(1);
    for (size_t i = 0; i < w.size() && !s.is_zero(); ++i) s *= eps_[letter(w, i)];
    return s;
}

const AlgElement& HopfStructure::antipode_word(const Word& w) const {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = kappa_cache_.find(w);
        if (it != kappa_cache_.end()) return it->second;
    }
    AlgElement v;
    if (w.empty()) {
        v = AlgElement::unit(alg_);
    } else {
        const AlgElement& head = antipode_word(w.substr(0, w.size() - 1));
        v = kappa_[letter(w, w.size() - 1)] * head;
    }
    std::lock_guard<std::mutex> lk(mu_);
    return kappa_cache_.emplace(w, std::move(v)).first->second;
}

TensorElement HopfStructure::coproduct(const AlgElement& a) const {
    TensorElement r({alg_, alg_});
    for (const auto& [w, c] : a.terms()) r += c * coproduct_word(w);
    return r;
}

TensorElement HopfStructure::apply_coproduct(const TensorElement& t, int leg) const {
    return map_leg(t, leg, {alg_, alg_}, [this](const Word& w) { return coproduct_word(w); });
}

TensorElement HopfStructure::apply_counit(const TensorElement& t, int leg) const {
    return map_leg(t, leg, {}, [this](const Word& w) { return from_scalar(counit_word(w)); });
}

TensorElement HopfStructure::apply_antipode(const TensorElement& t, int leg) const {
    return map_leg(t, leg, {alg_}, [this](const Word& w) { return from_alg(antipode_word(w)); });
}

TensorElement HopfStructure::coproduct_iterate(const AlgElement& a, int n) const {
    if (n < 1) throw AlgebraError("coproduct_iterate: n must be at least 1");
    TensorElement t = coproduct(a);
    for (int k = 1; k < n; ++k) t = apply_coproduct(t, t.degree() - 1);
    return t;
}

TensorElement HopfStructure::coproduct_iterate_left(const AlgElement& a, int n) const {
    if (n < 1) throw AlgebraError("coproduct_iterate: n must be at least 1");
    TensorElement t = coproduct(a);
    for (int k = 1; k < n; ++k) t = apply_coproduct(t, 0);
    return t;
}

Scalar HopfStructure::counit(const AlgElement& a) const {
    Scalar s(0);
    for (const auto& [w, c] : a.terms()) s += c * counit_word(w);
    return s;
}

AlgElement HopfStructure::antipode(const AlgElement& a) const {
    AlgElement r(alg_);
    for (const auto& [w, c] : a.terms()) r += c * antipode_word(w);
    return r;
}

const TensorElement& HopfStructure::adjoint_word(const Word& w) const {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = ad_cache_.find(w);
        if (it != ad_cache_.end()) return it->second;
    }
    TensorElement d2 = apply_coproduct(coproduct_word(w), 1);
    TensorElement v({alg_, alg_});
    for (const auto& [k, c] : d2.terms()) {
        AlgElement right = antipode_word(k[0]) * AlgElement::word(alg_, k[2]);
        for (const auto& [rw, rc] : right.terms()) v.add_term(Tuple{k[1], rw}, c * rc);
    }
    std::lock_guard<std::mutex> lk(mu_);
    return ad_cache_.emplace(w, std::move(v)).first->second;
}

TensorElement HopfStructure::adjoint_action(const AlgElement& a) const {
    TensorElement r({alg_, alg_});
    for (const auto& [w, c] : a.terms()) r += c * adjoint_word(w);
    return r;
}

Report verify_hopf_axioms(const HopfStructure& h, int window_degree) {
    Report rep;
    const PresentationPtr& A = h.algebra();
    CheckAccumulator coas("coassociativity"), cl("counit_left"), cr("counit_right"),
        al("antipode_left"), ar("antipode_right"), sc("star_coproduct"), se("star_counit"),
        sk("star_antipode"), rc("relations_coproduct"), re("relations_counit"),
        rk("relations_antipode"), rs("relations_star");

    for (const Word& w : h.window(window_degree)) {
        const std::string ws = A->word_str(w);
        const AlgElement a = AlgElement::word(A, w);
        const TensorElement& phi = h.coproduct_word(w);
        coas.expect(h.apply_coproduct(phi, 0) == h.apply_coproduct(phi, 1), ws);
        cl.expect(to_alg(h.apply_counit(phi, 0)) == a, ws);
        cr.expect(to_alg(h.apply_counit(phi, 1)) == a, ws);
        const AlgElement eps1 = AlgElement::unit(A, h.counit_word(w));
        al.expect(to_alg(multiply_legs(h.apply_antipode(phi, 0), 0)) == eps1, ws);
        ar.expect(to_alg(multiply_legs(h.apply_antipode(phi, 1), 0)) == eps1, ws);
        if (A->has_star()) {
            const AlgElement as = a.star();
            sc.expect(h.coproduct(as) == phi.star(), ws);
            se.expect(h.counit(as) == h.counit_word(w).conj(), ws);
            sk.expect(h.antipode(h.antipode_word(w).star()).star() == a, ws);
        }
    }
    for (const Rule& rule : A->rules()) {
        const std::string ws = A->word_str(rule.lhs);
        TensorElement phi_rhs({A, A});
        Scalar eps_rhs(0);
        AlgElement kappa_rhs(A);
        Terms raw_star_rhs;
        for (const auto& [w, c] : rule.rhs) {
            phi_rhs += c * h.coproduct_word(w);
            eps_rhs += c * h.counit_word(w);
            kappa_rhs += c * h.antipode_word(w);
        }
        rc.expect(h.coproduct_word(rule.lhs) == phi_rhs, ws);
        re.expect(h.counit_word(rule.lhs) == eps_rhs, ws);
        rk.expect(h.antipode_word(rule.lhs) == kappa_rhs, ws);
        if (A->has_star()) {
            Terms diff = rule.rhs;
            terms_add(diff, rule.lhs, Scalar(-1));
            // The star of lhs - rhs, taken on raw words, must lie in the relation ideal.
            rs.expect(A->star(diff).empty(), ws);
        }
    }
    for (auto* acc : {&coas, &cl, &cr, &al, &ar, &rc, &re, &rk}) acc->commit(rep);
    if (A->has_star())
        for (auto* acc : {&sc, &se, &sk, &rs}) acc->commit(rep);
    else
        for (const char* n : {"star_coproduct", "star_counit", "star_antipode", "relations_star"})
            rep.skip(n, "no involution");
    return rep;
}

Report verify_adjoint_coaction(const HopfStructure& h, int window_degree) {
    Report rep;
    const PresentationPtr& A = h.algebra();
    CheckAccumulator counit("ad_counit"), coas("ad_coassociativity");
    for (const Word& w : h.window(window_degree)) {
        const std::string ws = A->word_str(w);
        const TensorElement& ad = h.adjoint_word(w);
        counit.expect(to_alg(h.apply_counit(ad, 1)) == AlgElement::word(A, w), ws);
        TensorElement lhs = map_leg(ad, 0, {A, A}, [&](const Word& x) { return h.adjoint_word(x); });
        coas.expect(lhs == h.apply_coproduct(ad, 1), ws);
    }
    counit.commit(rep);
    coas.commit(rep);
    return rep;
}

}  // namespace qpb
