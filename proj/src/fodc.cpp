#include "qpb/fodc.hpp"

#include <deque>

namespace qpb {

Window::Window(const PresentationPtr& p, int degree) : p_(p), degree_(degree), words_(p->window(degree)) {
    for (size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], static_cast<int>(i));
}

std::optional<int> Window::index(const Word& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool Window::contains(const AlgElement& a) const {
    for (const auto& [w, c] : a.terms())
        if (!index_.count(w)) return false;
    return true;
}

SparseVec Window::coords(const AlgElement& a) const {
    std::map<int, Scalar> m;
    for (const auto& [w, c] : a.terms()) {
        auto it = index_.find(w);
        if (it == index_.end())
            throw WindowOverflow("window overflow: word '" + p_->word_str(w) +
                                 "' exceeds degree " + std::to_string(degree_));
        m[it->second] = c;
    }
    return sv_from_map(m);
}

AlgElement Window::element(const SparseVec& v) const {
    Terms t;
    for (const auto& [i, c] : v) terms_add(t, words_[i], c);
    return AlgElement(p_, std::move(t), true);
}

IdealSpan::IdealSpan(const HopfStructure& h, const IdealSpec& spec, const Window& w) : w_(w) {
    const auto& A = h.algebra();
    std::deque<AlgElement> queue;
    auto push = [&](const AlgElement& x) {
        if (!w_.contains(x)) return;
        SparseVec v = w_.coords(x);
        if (rr_.add(v)) {
            basis_.push_back(v);
            queue.push_back(x);
        }
    };
    for (const auto& g : spec.generators) {
        if (!h.counit(g).is_zero())
            throw CalculusError("ideal generator outside ker(eps): " + g.str());
        if (!w_.contains(g))
            throw WindowOverflow("ideal generator outside the window: " + g.str());
        for (const Word& u : w_.words()) push(g * AlgElement::word(A, u));
    }
    // Close under right multiplication by generators as long as the window allows.
    while (!queue.empty()) {
        AlgElement x = queue.front();
        queue.pop_front();
        for (int gi = 0; gi < A->num_generators(); ++gi)
            push(x * AlgElement::word(A, Word(1, static_cast<char>(gi))));
    }
}

bool IdealSpan::contains(const AlgElement& a) const {
    if (!w_.contains(a)) return false;
    return rr_.contains(w_.coords(a));
}

std::vector<AlgElement> IdealSpan::basis() const {
    std::vector<AlgElement> out;
    for (const auto& v : basis_) out.push_back(w_.element(v));
    return out;
}

InvariantFormSpace::InvariantFormSpace(HopfPtr h, IdealSpec ideal, int degree)
    : h_(std::move(h)), spec_(std::move(ideal)), degree_(degree) {
    if (degree < 1) throw CalculusError("window degree must be at least 1");
    const auto& A = h_->algebra();
    {
        IdealSpan at(*h_, spec_, Window(A, degree));
        dim_at_degree_ = at.quotient_dim();
    }
    ideal_ = std::make_unique<IdealSpan>(*h_, spec_, Window(A, degree + 1));
    dim_above_ = ideal_->quotient_dim();
    const Window& W = ideal_->window();
    for (int i = 1; i < W.size(); ++i)
        if (!ideal_->reducer().is_pivot(i)) {
            rep_of_index_[i] = static_cast<int>(reps_.size());
            reps_.push_back(W.word(i));
        }

    const int n = dim();
    circ_gen_.assign(A->num_generators(), Matrix(n, n));
    try {
        for (int g = 0; g < A->num_generators(); ++g) {
            AlgElement x = AlgElement::word(A, Word(1, static_cast<char>(g)));
            for (int i = 0; i < n; ++i) circ_gen_[g].col[i] = circ_direct(i, x);
        }
    } catch (const WindowOverflow& e) {
        circ_overflow_ = e.what();
    }

    // Coadjoint coaction and its well-definedness.
    varpi_.assign(n, {});
    for (int i = 0; i < n; ++i) {
        const TensorElement& ad = h_->adjoint_word(reps_[i]);
        std::map<Word, Terms, WordLess> by_right;
        for (const auto& [k, c] : ad.terms()) terms_add(by_right[k[1]], k[0], c);
        for (const auto& [y, left] : by_right) {
            SparseVec p = project(AlgElement(A, left, true));
            for (const auto& [m, c] : p) {
                auto it = varpi_[i].try_emplace(m, AlgElement(A)).first;
                it->second += c * AlgElement::word(A, y);
            }
        }
        for (auto it = varpi_[i].begin(); it != varpi_[i].end();)
            it = it->second.is_zero() ? varpi_[i].erase(it) : std::next(it);
    }
    for (const AlgElement& r : ideal_->basis()) {
        const TensorElement ad = h_->adjoint_action(r);
        std::map<Word, Terms, WordLess> by_right;
        for (const auto& [k, c] : ad.terms()) terms_add(by_right[k[1]], k[0], c);
        for (const auto& [y, left] : by_right) {
            AlgElement x(A, left, true);
            if (!ideal_->contains(x)) {
                bicovariant_ = false;
                bicov_witness_ = "ad(" + r.str() + ") has first leg " + x.str() + " ⊗ " +
                                 A->word_str(y) + " outside R";
                break;
            }
        }
        if (!bicovariant_) break;
    }

    // Star structure π(a)* = −π(κ(a)*).
    star_ = Matrix(n, n);
    if (A->has_star()) {
        for (const AlgElement& r : ideal_->basis()) {
            AlgElement s = h_->antipode(r).star();
            if (!ideal_->contains(s)) {
                star_ok_ = false;
                star_witness_ = "kappa(" + r.str() + ")* = " + s.str() + " not in R";
                break;
            }
        }
        for (int i = 0; i < n; ++i)
            star_.col[i] = sv_scale(project(h_->antipode_word(reps_[i]).star()), Scalar(-1));
    } else {
        star_ok_ = false;
        star_witness_ = "no involution";
    }
}

AlgElement InvariantFormSpace::rep(int i) const {
    const auto& A = h_->algebra();
    return AlgElement::word(A, reps_[i]) - AlgElement::unit(A, h_->counit_word(reps_[i]));
}

std::string InvariantFormSpace::basis_label(int i) const {
    return "pi(" + h_->algebra()->word_str(reps_[i]) + ")";
}

SparseVec InvariantFormSpace::project(const AlgElement& a) const {
    const Window& W = ideal_->window();
    SparseVec v = W.coords(a);
    Scalar eps = h_->counit(a);
    v = sv_axpy(v, -eps, sv_unit(0));
    SparseVec r = ideal_->reducer().reduce(v);
    SparseVec out;
    for (const auto& [i, c] : r) {
        if (i == 0) continue;
        out.emplace_back(rep_of_index_.at(i), c);
    }
    return out;
}

AlgElement InvariantFormSpace::lift(const SparseVec& v) const {
    AlgElement r(h_->algebra());
    for (const auto& [i, c] : v) r += c * rep(i);
    return r;
}

SparseVec InvariantFormSpace::circ_direct(int i, const AlgElement& a) const {
    const auto& A = h_->algebra();
    AlgElement prod = AlgElement::word(A, reps_[i]) * a;
    SparseVec v = project(prod);
    Scalar e = h_->counit_word(reps_[i]);
    if (!e.is_zero()) v = sv_axpy(v, -e, project(a));
    return v;
}

Matrix InvariantFormSpace::circ_word(const Word& w) const {
    if (!circ_overflow_.empty()) throw WindowOverflow(circ_overflow_);
    Matrix m = Matrix::identity(dim());
    for (size_t k = 0; k < w.size(); ++k) m = circ_gen_[letter(w, k)] * m;
    return m;
}

Matrix InvariantFormSpace::circ_matrix(const AlgElement& a) const {
    Matrix m(dim(), dim());
    for (const auto& [w, c] : a.terms()) m = m + circ_word(w).scaled(c);
    return m;
}

SparseVec InvariantFormSpace::circ(const SparseVec& theta, const AlgElement& a) const {
    return circ_matrix(a).apply(theta);
}

SparseVec InvariantFormSpace::star(const SparseVec& theta) const {
    if (!star_ok_) throw CalculusError("star structure not defined: " + star_witness_);
    SparseVec r;
    for (const auto& [i, c] : theta) r = sv_axpy(r, c.conj(), star_.col[i]);
    return r;
}

bool InvariantFormSpace::circ_respects_relations(std::string* witness) const {
    for (const Rule& rule : h_->algebra()->rules()) {
        Matrix rhs(dim(), dim());
        for (const auto& [w, c] : rule.rhs) rhs = rhs + circ_word(w).scaled(c);
        if (!(circ_word(rule.lhs) == rhs)) {
            if (witness) *witness = "relation " + h_->algebra()->word_str(rule.lhs);
            return false;
        }
    }
    return true;
}

Report verify_calculus_covariance(const InvariantFormSpace& s) {
    Report rep;
    const HopfStructure& h = *s.hopf();
    const auto& A = h.algebra();
    const int n = s.dim();
    rep.add("ad_invariance", s.bicovariant(), s.bicovariance_witness());
    rep.add("star_invariance", s.star_compatible(), s.star_witness());
    if (s.star_compatible()) {
        Matrix st = s.star_matrix();
        rep.add("star_involution", st * st == Matrix::identity(n), "star∘star ≠ id");
    }
    if (!s.circ_available()) {
        rep.add("circ_tables", false, s.circ_overflow());
        return rep;
    }
    std::string wit;
    rep.add("circ_relations", s.circ_respects_relations(&wit), wit);

    const std::vector<Word> words = A->window(s.window_degree());
    CheckAccumulator direct("circ_direct"), module("circ_module_law");
    for (const Word& w : words) {
        const AlgElement a = AlgElement::word(A, w);
        const Matrix Ma = s.circ_word(w);
        for (int i = 0; i < n; ++i) {
            if (!s.window().contains(AlgElement::word(A, s.rep_word(i)) * a)) continue;
            direct.expect(Ma.apply(sv_unit(i)) == s.circ_direct(i, a),
                          s.basis_label(i) + " o " + A->word_str(w));
        }
        for (const Word& w2 : words) {
            const AlgElement b = AlgElement::word(A, w2);
            module.expect(s.circ_matrix(a * b) == s.circ_word(w2) * Ma,
                          A->word_str(w) + " , " + A->word_str(w2));
        }
    }
    direct.commit(rep);
    module.commit(rep);

    // π is onto Ψ_inv and its kernel in the window is exactly R ∩ window.
    {
        const Window& W = s.window();
        std::vector<SparseVec> images;
        for (int i = 1; i < W.size(); ++i) images.push_back(s.project(AlgElement::word(A, W.word(i))));
        Matrix P(n, static_cast<int>(images.size()));
        P.col = images;
        const int ker_dim = static_cast<int>(P.kernel().size());
        bool ok = P.rank() == n && ker_dim == s.ideal().dim();
        std::vector<SparseVec> ideal_vecs;
        for (const auto& r : s.ideal().basis()) {
            ok = ok && s.project(r).empty();
            ideal_vecs.push_back(W.coords(r));
        }
        ok = ok && rank_bareiss(ideal_vecs, W.size()) == s.ideal().dim();
        rep.add("projection_exactness", ok, "rank/kernel mismatch for pi");
    }

    if (!s.bicovariant()) {
        for (const char* name : {"varpi_counit", "varpi_coaction", "varpi_circ", "varpi_star"})
            rep.skip(name, "ideal is not ad-invariant");
        return rep;
    }
    CheckAccumulator vc("varpi_counit"), vco("varpi_coaction"), vci("varpi_circ"), vs("varpi_star");
    for (int i = 0; i < n; ++i) {
        SparseVec back;
        for (const auto& [k, c] : s.varpi(i)) back = sv_axpy(back, h.counit(c), sv_unit(k));
        vc.expect(back == sv_unit(i), s.basis_label(i));
        for (int m = 0; m < n; ++m) {
            TensorElement lhs({A, A});
            for (const auto& [k, c] : s.varpi(i)) {
                auto it = s.varpi(k).find(m);
                if (it != s.varpi(k).end()) lhs += tensor(it->second, c);
            }
            auto it = s.varpi(i).find(m);
            TensorElement rhs = it == s.varpi(i).end() ? TensorElement({A, A}) : h.coproduct(it->second);
            vco.expect(lhs == rhs, s.basis_label(i));
        }
    }
    // ϖ(ϑ∘a) = Σ (ϑ_k∘a^(2)) ⊗ κ(a^(1)) c_k a^(3)
    const int circ_deg = std::min(s.window_degree(), 2);
    for (const Word& w : A->window(circ_deg)) {
        const AlgElement a = AlgElement::word(A, w);
        const TensorElement d2 = h.coproduct_iterate(a, 2);
        for (int i = 0; i < n; ++i) {
            std::map<int, AlgElement> lhs, rhs;
            SparseVec ia = s.circ(sv_unit(i), a);
            for (const auto& [j, cj] : ia)
                for (const auto& [k, c] : s.varpi(j)) {
                    auto it = lhs.try_emplace(k, AlgElement(A)).first;
                    it->second += cj * c;
                }
            for (const auto& [key, coef] : d2.terms()) {
                const AlgElement& left = h.antipode_word(key[0]);
                const AlgElement right = AlgElement::word(A, key[2]);
                const Matrix M = s.circ_word(key[1]);
                for (const auto& [k, c] : s.varpi(i)) {
                    AlgElement val = left * c * right;
                    for (const auto& [m, cm] : M.col[k]) {
                        auto it = rhs.try_emplace(m, AlgElement(A)).first;
                        it->second += (coef * cm) * val;
                    }
                }
            }
            auto clean = [](std::map<int, AlgElement>& m) {
                for (auto it = m.begin(); it != m.end();) it = it->second.is_zero() ? m.erase(it) : std::next(it);
            };
            clean(lhs);
            clean(rhs);
            vci.expect(lhs == rhs, s.basis_label(i) + " o " + A->word_str(w));
        }
    }
    if (s.star_compatible()) {
        // ϖ(ϑ*) = Σ_k e_k* ⊗ c_k*
        for (int i = 0; i < n; ++i) {
            std::map<int, AlgElement> lhs, rhs;
            for (const auto& [j, cj] : s.star(sv_unit(i)))
                for (const auto& [k, c] : s.varpi(j)) {
                    auto it = lhs.try_emplace(k, AlgElement(A)).first;
                    it->second += cj * c;
                }
            for (const auto& [k, c] : s.varpi(i))
                for (const auto& [m, cm] : s.star(sv_unit(k))) {
                    auto it = rhs.try_emplace(m, AlgElement(A)).first;
                    it->second += cm * c.star();
                }
            for (auto* mp : {&lhs, &rhs})
                for (auto it = mp->begin(); it != mp->end();)
                    it = it->second.is_zero() ? mp->erase(it) : std::next(it);
            vs.expect(lhs == rhs, s.basis_label(i));
        }
    }
    vc.commit(rep);
    vco.commit(rep);
    vci.commit(rep);
    if (s.star_compatible())
        vs.commit(rep);
    else
        rep.skip("varpi_star", "star structure not defined");
    return rep;
}

Scalar EpsDerivation::apply_word(const HopfStructure& h, const Word& w) const {
    Scalar total(0);
    for (size_t i = 0; i < w.size(); ++i) {
        Scalar t = values.at(letter(w, i));
        for (size_t j = 0; j < w.size() && !t.is_zero(); ++j)
            if (j != i) t *= h.counit_table()[letter(w, j)];
        total += t;
    }
    return total;
}

Scalar EpsDerivation::apply(const HopfStructure& h, const AlgElement& a) const {
    Scalar total(0);
    for (const auto& [w, c] : a.terms()) total += c * apply_word(h, w);
    return total;
}

bool verify_eps_derivation(const HopfStructure& h, const EpsDerivation& x, int degree,
                           std::string* witness) {
    const auto& A = h.algebra();
    if (static_cast<int>(x.values.size()) != A->num_generators()) {
        if (witness) *witness = "functional table size mismatch";
        return false;
    }
    // Consistency with the relations, then the derivation law on window pairs.
    for (const Rule& r : A->rules()) {
        Scalar rhs(0);
        for (const auto& [w, c] : r.rhs) rhs += c * x.apply_word(h, w);
        if (!(x.apply_word(h, r.lhs) == rhs)) {
            if (witness) *witness = "relation " + A->word_str(r.lhs);
            return false;
        }
    }
    const auto words = A->window(degree);
    for (const Word& a : words)
        for (const Word& b : words) {
            AlgElement ab = AlgElement::word(A, a) * AlgElement::word(A, b);
            Scalar lhs = x.apply(h, ab);
            Scalar rhs = h.counit_word(a) * x.apply_word(h, b) + x.apply_word(h, a) * h.counit_word(b);
            if (!(lhs == rhs)) {
                if (witness) *witness = A->word_str(a) + " , " + A->word_str(b);
                return false;
            }
        }
    return true;
}

IdealSpec counit_kernel(const HopfStructure& h, int degree) {
    const auto& A = h.algebra();
    IdealSpec spec;
    for (const Word& w : A->window(degree)) {
        if (w.empty()) continue;
        spec.generators.push_back(AlgElement::word(A, w) - AlgElement::unit(A, h.counit_word(w)));
    }
    return spec;
}

IdealSpec classical_ideal(const HopfStructure& h, const std::vector<EpsDerivation>& xs, int degree) {
    const auto& A = h.algebra();
    for (const auto& x : xs) {
        std::string wit;
        if (!verify_eps_derivation(h, x, degree, &wit))
            throw CalculusError("functional is not an eps-derivation: " + wit);
    }
    IdealSpec ker = counit_kernel(h, degree);
    if (xs.empty()) return ker;
    std::map<Word, int, WordLess> slot;
    std::vector<SparseVec> images;
    for (const auto& v : ker.generators) {
        TensorElement ad = h.adjoint_action(v);
        std::map<int, Scalar> img;
        for (size_t xi = 0; xi < xs.size(); ++xi)
            for (const auto& [k, c] : ad.terms()) {
                Scalar val = xs[xi].apply_word(h, k[0]);
                if (val.is_zero()) continue;
                auto it = slot.try_emplace(k[1], static_cast<int>(slot.size())).first;
                img[static_cast<int>(xi) + static_cast<int>(xs.size()) * it->second] += c * val;
            }
        images.push_back(sv_from_map(img));
    }
    IdealSpec out;
    for (const auto& combo : kernel_of(images)) {
        AlgElement a(A);
        for (const auto& [i, c] : combo) a += c * ker.generators[i];
        out.generators.push_back(a);
    }
    return out;
}

}  // namespace qpb
