#include "qpb/vh.hpp"

#include <algorithm>
#include <random>

namespace qpb {

namespace {

int sign_of(int e) { return ((e % 2) + 2) % 2 ? -1 : 1; }

void add_term(std::map<VHKey, Scalar>& m, const VHKey& k, const Scalar& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = m.try_emplace(k, c);
    if (fresh) return;
    it->second += c;
    if (it->second.is_zero()) m.erase(it);
}

void add_term(std::map<FKey, Scalar>& m, const FKey& k, const Scalar& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = m.try_emplace(k, c);
    if (fresh) return;
    it->second += c;
    if (it->second.is_zero()) m.erase(it);
}

template <class Key>
struct Indexer {
    std::map<Key, int> idx;
    int slot(const Key& k) { return idx.try_emplace(k, static_cast<int>(idx.size())).first->second; }
};

template <class Key>
SparseVec coords(Indexer<Key>& ix, const std::map<Key, Scalar>& terms) {
    std::map<int, Scalar> m;
    for (const auto& [k, c] : terms) m[ix.slot(k)] += c;
    return sv_from_map(m);
}

// π(c − ε(c)) for an 𝒜 word.
SparseVec pi_word(const InvariantFormSpace& s, const Word& c) {
    const HopfStructure& h = *s.hopf();
    AlgElement a = AlgElement::word(h.algebra(), c) - AlgElement::unit(h.algebra(), h.counit_word(c));
    if (a.is_zero()) return {};
    return s.project(a);
}

VHElement scaled(const Scalar& s, VHElement x) {
    if (s.is_zero()) return {};
    for (auto& [k, c] : x.terms) c *= s;
    return x;
}

// Draws basis keys and small integer combinations.
struct Sampler {
    std::mt19937_64 rng;
    const std::vector<VHKey>& keys;

    Sampler(unsigned long long seed, const std::vector<VHKey>& k) : rng(seed), keys(k) {}
    const VHKey& key() { return keys[std::uniform_int_distribution<size_t>(0, keys.size() - 1)(rng)]; }
    Scalar coef() {
        int c = std::uniform_int_distribution<int>(1, 3)(rng);
        return Scalar(rng() % 2 ? c : -c);
    }
    VHElement combo(int terms) {
        VHElement x;
        for (int i = 0; i < terms; ++i) add_term(x.terms, key(), coef());
        return x;
    }
};

// Degree n + extra stays representable.
bool fits(const VHAlgebra& vh, int n) { return n <= vh.max_degree() || vh.vanishes_above(); }

}  // namespace

// ---------------------------------------------------------------------------
// VHElement

VHElement VHElement::operator-() const { return scaled(Scalar(-1), *this); }

VHElement& VHElement::operator+=(const VHElement& o) {
    for (const auto& [k, c] : o.terms) add_term(terms, k, c);
    return *this;
}

VHElement& VHElement::operator-=(const VHElement& o) {
    for (const auto& [k, c] : o.terms) add_term(terms, k, -c);
    return *this;
}

VHElement operator*(const Scalar& s, const VHElement& a) { return scaled(s, a); }

// ---------------------------------------------------------------------------
// VHAlgebra

VHAlgebra::VHAlgebra(BundlePtr b, EnvelopePtr env) : b_(std::move(b)), env_(std::move(env)) {
    if (env_->calculus()->hopf()->algebra() != b_->algebra())
        throw VHError("calculus and bundle have different structure algebras");
    vanish_ = env_->variant() != EnvelopeVariant::tensor && env_->quotient_dim(env_->max_degree()) == 0;
}

SparseVec VHAlgebra::env_reduce(int n, const SparseVec& v) const {
    if (n > env_->max_degree()) {
        if (vanish_ || v.empty()) return {};
        throw VHError("vh degree " + std::to_string(n) + " above the envelope degree " +
                      std::to_string(env_->max_degree()));
    }
    return env_->reduce(n, v);
}

SparseVec VHAlgebra::env_multiply(int n, const SparseVec& a, int m, const SparseVec& b) const {
    if (a.empty() || b.empty()) return {};
    if (n + m > env_->max_degree()) return env_reduce(n + m, a);
    return env_->multiply(n, a, m, b);
}

const SparseVec& VHAlgebra::circ_basis(int n, int flat, const Word& c) const {
    const auto key = std::make_tuple(n, flat, c);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = circ_cache_.find(key);
        if (it != circ_cache_.end()) return it->second;
    }
    SparseVec v = env_->circ(n, sv_unit(flat), AlgElement::word(b_->algebra(), c));
    std::lock_guard<std::mutex> lock(mu_);
    return circ_cache_.emplace(key, std::move(v)).first->second;
}

void VHAlgebra::accumulate(VHElement& out, const Terms& hor, int n, const SparseVec& v, const Scalar& c) const {
    for (const auto& [w, cw] : hor)
        for (const auto& [f, cf] : v) add_term(out.terms, VHKey{w, n, f}, c * cw * cf);
}

VHElement VHAlgebra::one() const {
    VHElement r;
    r.terms.emplace(VHKey{Word(), 0, 0}, Scalar(1));
    return r;
}

VHElement VHAlgebra::hor(const AlgElement& phi) const {
    VHElement r;
    accumulate(r, phi.terms(), 0, sv_unit(0), Scalar(1));
    return r;
}

VHElement VHAlgebra::vert(int n, const SparseVec& v) const {
    VHElement r;
    accumulate(r, Terms{{Word(), Scalar(1)}}, n, env_reduce(n, v), Scalar(1));
    return r;
}

VHElement VHAlgebra::pure(const AlgElement& phi, int n, const SparseVec& v) const {
    VHElement r;
    accumulate(r, phi.terms(), n, env_reduce(n, v), Scalar(1));
    return r;
}

VHElement VHAlgebra::element(const VHKey& k) const {
    VHElement r;
    r.terms.emplace(k, Scalar(1));
    return r;
}

VHElement VHAlgebra::multiply(const VHElement& x, const VHElement& y) const {
    VHElement out;
    const auto& H = b_->hor();
    for (const auto& [ky, cy] : y.terms) {
        const TensorElement& F = b_->coact_word(ky.hor);
        const int gy = H->word_grade(ky.hor);
        const SparseVec right = sv_unit(ky.flat);
        for (const auto& [kx, cx] : x.terms) {
            const Scalar s = cx * cy * Scalar(sign_of(kx.n * gy));
            const Terms left{{kx.hor, Scalar(1)}};
            for (const auto& [key, cf] : F.terms()) {
                const SparseVec& eta = circ_basis(kx.n, kx.flat, key[1]);
                if (eta.empty()) continue;
                SparseVec prod = env_multiply(kx.n, eta, ky.n, right);
                if (prod.empty()) continue;
                accumulate(out, H->multiply(left, Terms{{key[0], Scalar(1)}}), kx.n + ky.n, prod, s * cf);
            }
        }
    }
    return out;
}

VHElement VHAlgebra::star(const VHElement& x) const {
    VHElement out;
    const auto& H = b_->hor();
    const auto& A = b_->algebra();
    for (const auto& [k, c] : x.terms) {
        const TensorElement& F = b_->coact_word(k.hor);
        const SparseVec ts = env_->star(k.n, sv_unit(k.flat));
        for (const auto& [key, cf] : F.terms()) {
            SparseVec v = env_->circ(k.n, ts, AlgElement::word(A, key[1]).star());
            if (v.empty()) continue;
            accumulate(out, AlgElement::word(H, key[0]).star().terms(), k.n, v, c.conj() * cf.conj());
        }
    }
    return out;
}

int VHAlgebra::grade(const VHElement& x) const {
    int g = -2;
    for (const auto& [k, c] : x.terms) {
        const int gk = grade(k);
        if (g == -2) g = gk;
        else if (g != gk) return -1;
    }
    return g == -2 ? 0 : g;
}

AlgElement VHAlgebra::horizontal_part(const VHElement& x) const {
    Terms t;
    for (const auto& [k, c] : x.terms)
        if (k.n == 0) t.emplace(k.hor, c);
    return AlgElement(b_->hor(), t, true);
}

std::vector<VHKey> VHAlgebra::window(int hor_degree, int env_degree) const {
    std::vector<VHKey> out;
    const int top = std::min(env_degree, env_->max_degree());
    for (const Word& w : b_->hor()->window(hor_degree))
        for (int n = 0; n <= top; ++n)
            for (int f : env_->basis(n)) out.push_back(VHKey{w, n, f});
    return out;
}

std::string VHAlgebra::str(const VHElement& x) const {
    if (x.is_zero()) return "0";
    std::string s;
    for (const auto& [k, c] : x.terms) {
        if (!s.empty()) s += " + ";
        s += "(" + c.str() + ")" + b_->hor()->word_str(k.hor) + "⊗" + env_->label(k.n, k.flat);
    }
    return s;
}

// ---------------------------------------------------------------------------
// descent of the natural maps

std::vector<AlgElement> descend(const NaturalMap& nu, const InvariantFormSpace& s) {
    std::vector<AlgElement> out;
    for (int i = 0; i < s.dim(); ++i) out.push_back(nu.value(s.rep(i)));
    return out;
}

bool descends(const NaturalMap& nu, const InvariantFormSpace& s, std::string* witness) {
    for (const AlgElement& r : s.ideal().basis()) {
        AlgElement v;
        try {
            v = nu.value(r);
        } catch (const std::exception& e) {
            if (witness) *witness = r.str() + ": " + e.what();
            return false;
        }
        if (!v.is_zero()) {
            if (witness) *witness = "value on " + r.str() + " is " + v.str();
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// ∂_D

VHDifferential::VHDifferential(VHPtr vh, Derivation D, std::vector<AlgElement> rho)
    : vh_(std::move(vh)), D_(std::move(D)), rho_(std::move(rho)) {
    if (static_cast<int>(rho_.size()) != vh_->dim()) throw VHError("curvature table size mismatch");
}

VHElement VHDifferential::on_hor(const Word& w) const {
    const Bundle& b = *vh_->bundle();
    const auto& H = b.hor();
    VHElement r = vh_->hor(D_.apply_word(w));
    const TensorElement& F = b.coact_word(w);
    const Scalar s(sign_of(H->word_grade(w)));
    for (const auto& [key, cf] : F.terms()) {
        SparseVec p = pi_word(*vh_->calculus(), key[1]);
        if (p.empty()) continue;
        r += (s * cf) * vh_->pure(AlgElement::word(H, key[0]), 1, p);
    }
    return r;
}

VHElement VHDifferential::on_gen(int i) const {
    return vh_->hor(rho_.at(i)) + vh_->vert(2, vh_->envelope()->d_generator(i));
}

VHElement VHDifferential::apply_key(const Word& w, int n, int flat) const {
    const VHKey key{w, n, flat};
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    const auto& H = vh_->bundle()->hor();
    const int d = vh_->dim();
    const auto mi = multi_index(flat, d, n);
    VHElement r = vh_->multiply(on_hor(w), vh_->vert(n, sv_unit(flat)));
    const int gw = H->word_grade(w);
    VHElement left = vh_->hor(AlgElement::word(H, w));
    for (int j = 0; j < n; ++j) {
        VHElement term = vh_->multiply(left, on_gen(mi[j]));
        if (j + 1 < n) {
            const std::vector<int> tail(mi.begin() + j + 1, mi.end());
            term = vh_->multiply(term, vh_->vert(n - j - 1, sv_unit(flat_index(tail, d))));
        }
        r += Scalar(sign_of(gw + j)) * term;
        left = vh_->multiply(left, vh_->gen(mi[j]));
    }
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(key, std::move(r)).first->second;
}

VHElement VHDifferential::apply(const VHElement& x) const {
    VHElement r;
    for (const auto& [k, c] : x.terms) r += c * apply_key(k.hor, k.n, k.flat);
    return r;
}

VHElement VHDifferential::apply_raw(const Word& w, int n, const SparseVec& v) const {
    VHElement r;
    for (const auto& [f, c] : v) r += c * apply_key(w, n, f);
    return r;
}

// ---------------------------------------------------------------------------
// h_E

GaugeMap::GaugeMap(VHPtr vh, std::vector<AlgElement> chi, std::string label)
    : vh_(std::move(vh)), chi_(std::move(chi)), label_(std::move(label)) {
    if (static_cast<int>(chi_.size()) != vh_->dim()) throw VHError("gauge table size mismatch");
}

VHElement GaugeMap::apply_raw(const Word& w, int n, const SparseVec& v) const {
    VHElement r;
    const int d = vh_->dim();
    for (const auto& [f, c] : v) {
        const VHKey key{w, n, f};
        VHElement img;
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = cache_.find(key);
            if (it != cache_.end()) img = it->second;
        }
        if (img.is_zero()) {
            img = vh_->hor(AlgElement::word(vh_->bundle()->hor(), w));
            for (int i : multi_index(f, d, n)) img = vh_->multiply(img, vh_->gen(i) - vh_->hor(chi_[i]));
            std::lock_guard<std::mutex> lock(mu_);
            cache_.emplace(key, img);
        }
        r += c * img;
    }
    return r;
}

VHElement GaugeMap::apply(const VHElement& x) const {
    VHElement r;
    for (const auto& [k, c] : x.terms) r += c * apply_raw(k.hor, k.n, sv_unit(k.flat));
    return r;
}

// ---------------------------------------------------------------------------
// charts

ChartFamily::ChartFamily(VHPtr vh, std::vector<Derivation> charts, MultipletTable m, int witness_length)
    : vh_(std::move(vh)), charts_(std::move(charts)), m_(std::move(m)), witness_length_(witness_length) {
    if (charts_.empty()) throw VHError("a chart family needs at least one preconnection");
    const auto& s = *vh_->calculus();
    for (const auto& D : charts_)
        diffs_.push_back(std::make_unique<VHDifferential>(
            vh_, D, descend(rho_natural(vh_->bundle(), D, m_, witness_length_), s)));
    trans_.resize(charts_.size());
    for (size_t i = 0; i < charts_.size(); ++i)
        for (size_t j = 0; j < charts_.size(); ++j) {
            const Derivation E = (charts_[j] - charts_[i]).with_label(charts_[j].label() + "-" + charts_[i].label());
            trans_[i].push_back(std::make_unique<GaugeMap>(
                vh_, descend(chi_natural(vh_->bundle(), E, m_, witness_length_), s), E.label()));
        }
}

GaugeMap ChartFamily::gauge(const Derivation& E) const {
    return GaugeMap(vh_, descend(chi_natural(vh_->bundle(), E, m_, witness_length_), *vh_->calculus()), E.label());
}

const GaugeMap& ChartFamily::transition(int i, int j) const { return *trans_.at(i).at(j); }

GluedForm ChartFamily::glue(const GluedForm& x, int target) const {
    if (x.chart == target) return x;
    return GluedForm{target, transition(x.chart, target).apply(x.x)};
}

GluedForm ChartFamily::d(const GluedForm& x) const { return GluedForm{x.chart, differential(x.chart).apply(x.x)}; }

GluedForm ChartFamily::multiply(const GluedForm& x, const GluedForm& y) const {
    return GluedForm{x.chart, vh_->multiply(x.x, glue(y, x.chart).x)};
}

Report ChartFamily::verify_descent() const {
    Report rep;
    const auto& s = *vh_->calculus();
    CheckAccumulator rho("rho_descends"), chi("chi_descends");
    for (const auto& D : charts_) {
        std::string w;
        rho.expect(descends(rho_natural(vh_->bundle(), D, m_, witness_length_), s, &w), D.label() + ": " + w);
    }
    for (size_t i = 0; i < charts_.size(); ++i)
        for (size_t j = i + 1; j < charts_.size(); ++j) {
            std::string w;
            chi.expect(descends(chi_natural(vh_->bundle(), charts_[j] - charts_[i], m_, witness_length_), s, &w),
                       charts_[j].label() + "-" + charts_[i].label() + ": " + w);
        }
    rho.commit(rep);
    chi.commit(rep);
    return rep;
}

// ---------------------------------------------------------------------------
// F̂

FHat::FHat(VHPtr vh) : vh_(std::move(vh)) {}

FElement FHat::on_key(const VHKey& k) const {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(k);
        if (it != cache_.end()) return it->second;
    }
    const auto& s = *vh_->calculus();
    FElement r;
    for (const auto& [key, cf] : vh_->bundle()->coact_word(k.hor).terms())
        add_term(r.terms, FKey{VHKey{key[0], 0, 0}, key[1], 0, 0}, cf);
    for (int i : multi_index(k.flat, vh_->dim(), k.n)) {
        FElement w;
        for (const auto& [j, c] : s.varpi(i))
            for (const auto& [a, ca] : c.terms()) add_term(w.terms, FKey{VHKey{Word(), 1, j}, a, 0, 0}, ca);
        add_term(w.terms, FKey{VHKey{Word(), 0, 0}, Word(), 1, i}, Scalar(1));
        r = multiply(r, w);
    }
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(k, std::move(r)).first->second;
}

FElement FHat::apply(const VHElement& x) const {
    FElement r;
    for (const auto& [k, c] : x.terms) r = add(r, on_key(k), c);
    return r;
}

FElement FHat::add(const FElement& x, const FElement& y, const Scalar& s) const {
    FElement r = x;
    for (const auto& [k, c] : y.terms) add_term(r.terms, k, s * c);
    return r;
}

FElement FHat::multiply(const FElement& x, const FElement& y) const {
    FElement out;
    const HopfStructure& h = *vh_->calculus()->hopf();
    const auto& A = h.algebra();
    for (const auto& [ky, cy] : y.terms) {
        const int gy = vh_->grade(ky.x);
        const TensorElement& cop = h.coproduct_word(ky.a);
        for (const auto& [kx, cx] : x.terms) {
            const VHElement xy = vh_->multiply(vh_->element(kx.x), vh_->element(ky.x));
            if (xy.is_zero()) continue;
            const Scalar s = cx * cy * Scalar(sign_of(kx.m * gy));
            for (const auto& [key, cb] : cop.terms()) {
                const SparseVec& t = vh_->circ_basis(kx.m, kx.flat, key[1]);
                if (t.empty()) continue;
                const SparseVec g = vh_->env_multiply(kx.m, t, ky.m, sv_unit(ky.flat));
                if (g.empty()) continue;
                const Terms ab = A->multiply(Terms{{kx.a, Scalar(1)}}, Terms{{key[0], Scalar(1)}});
                for (const auto& [vk, vc] : xy.terms)
                    for (const auto& [aw, ac] : ab)
                        for (const auto& [gf, gc] : g)
                            add_term(out.terms, FKey{vk, aw, kx.m + ky.m, gf}, s * cb * vc * ac * gc);
            }
        }
    }
    return out;
}

FElement FHat::differential(const VHDifferential& dd, const FElement& x) const {
    FElement out;
    const auto& s = *vh_->calculus();
    const HopfStructure& h = *s.hopf();
    const auto& env = *vh_->envelope();
    for (const auto& [k, c] : x.terms) {
        for (const auto& [vk, vc] : dd.apply(vh_->element(k.x)).terms)
            add_term(out.terms, FKey{vk, k.a, k.m, k.flat}, c * vc);
        const Scalar sg = c * Scalar(sign_of(vh_->grade(k.x)));
        const TensorElement& cop = h.coproduct_word(k.a);
        for (const auto& [key, cb] : cop.terms()) {
            const SparseVec p = pi_word(s, key[1]);
            if (p.empty()) continue;
            for (const auto& [f, cf] : vh_->env_multiply(1, p, k.m, sv_unit(k.flat)))
                add_term(out.terms, FKey{k.x, key[0], k.m + 1, f}, sg * cb * cf);
        }
        if (k.m > 0 && fits(*vh_, k.m + 1)) {
            const SparseVec dv =
                k.m + 1 > env.max_degree() ? SparseVec{}
                                           : vh_->env_reduce(k.m + 1, env.differential_matrix(k.m).apply(sv_unit(k.flat)));
            for (const auto& [f, cf] : dv) add_term(out.terms, FKey{k.x, k.a, k.m + 1, f}, sg * cf);
        } else if (k.m > 0) {
            throw VHError("d on Γ leaves the envelope");
        }
    }
    return out;
}

FElement FHat::gauge(const GaugeMap& hm, const FElement& x) const {
    FElement out;
    for (const auto& [k, c] : x.terms)
        for (const auto& [vk, vc] : hm.apply(vh_->element(k.x)).terms)
            add_term(out.terms, FKey{vk, k.a, k.m, k.flat}, c * vc);
    return out;
}

FElement FHat::vertical_part(const FElement& x) const {
    FElement out;
    for (const auto& [k, c] : x.terms)
        if (k.m > 0) out.terms.emplace(k, c);
    return out;
}

// ---------------------------------------------------------------------------
// checks

Report verify_vh_algebra(const VHAlgebra& vh, int hor_degree, int env_degree, unsigned long long seed) {
    Report rep;
    const auto keys = vh.window(hor_degree, env_degree);
    const auto& H = vh.bundle()->hor();
    const auto& s = *vh.calculus();
    Sampler smp(seed, keys);
    CheckAccumulator assoc("associativity"), unit("unit"), inv("star_involution"), anti("star_antimultiplicative"),
        fact("factorization"), hsub("hor_subalgebra"), comm("commutation_rule");

    auto show = [&](const VHKey& k) { return vh.str(vh.element(k)); };
    for (int t = 0; t < 40; ++t) {
        const VHKey a = smp.key(), b = smp.key(), c = smp.key();
        if (!fits(vh, a.n + b.n + c.n)) continue;
        const VHElement x = vh.element(a), y = vh.element(b), z = vh.element(c);
        assoc.expect_lazy(vh.multiply(vh.multiply(x, y), z) == vh.multiply(x, vh.multiply(y, z)),
                          [&] { return show(a) + " · " + show(b) + " · " + show(c); });
        const VHElement xy = vh.multiply(x, y);
        const VHElement rhs = Scalar(sign_of(vh.grade(a) * vh.grade(b))) * vh.multiply(vh.star(y), vh.star(x));
        anti.expect_lazy(vh.star(xy) == rhs, [&] { return "(" + show(a) + ")(" + show(b) + ")"; });
    }
    for (const VHKey& k : keys) {
        const VHElement x = vh.element(k);
        unit.expect_lazy(vh.multiply(vh.one(), x) == x && vh.multiply(x, vh.one()) == x, [&] { return show(k); });
        inv.expect_lazy(vh.star(vh.star(x)) == x, [&] { return show(k); });
        const VHElement split =
            vh.multiply(vh.hor(AlgElement::word(H, k.hor)), vh.vert(k.n, sv_unit(k.flat)));
        fact.expect_lazy(split == x, [&] { return show(k); });
    }
    const auto words = H->window(hor_degree);
    for (const Word& u : words)
        for (const Word& w : words) {
            const AlgElement a = AlgElement::word(H, u), b = AlgElement::word(H, w);
            hsub.expect_lazy(vh.multiply(vh.hor(a), vh.hor(b)) == vh.hor(a * b),
                             [&] { return H->word_str(u) + " · " + H->word_str(w); });
        }
    // (1⊗e_i)(φ⊗1) against the direct formula for e_i∘c.
    const auto& A = vh.bundle()->algebra();
    for (const Word& w : words)
        for (int i = 0; i < vh.dim(); ++i) {
            VHElement expect;
            bool ok = true;
            try {
                for (const auto& [key, cf] : vh.bundle()->coact_word(w).terms())
                    expect += (Scalar(sign_of(H->word_grade(w))) * cf) *
                              vh.pure(AlgElement::word(H, key[0]), 1, s.circ_direct(i, AlgElement::word(A, key[1])));
            } catch (const std::exception&) {
                ok = false;
            }
            if (!ok) continue;
            comm.expect_lazy(vh.multiply(vh.gen(i), vh.hor(AlgElement::word(H, w))) == expect,
                             [&] { return s.basis_label(i) + " · " + H->word_str(w); });
        }
    for (auto* c : {&assoc, &unit, &inv, &anti, &fact, &hsub, &comm}) c->commit(rep);
    return rep;
}

Report verify_differential(const ChartFamily& f, int chart, int hor_degree, unsigned long long seed) {
    Report rep;
    const VHAlgebra& vh = *f.vh();
    const VHDifferential& dd = f.differential(chart);
    const auto& H = vh.bundle()->hor();
    const int ed = vh.vanishes_above() ? vh.max_degree() : vh.max_degree() - 1;
    const auto keys = vh.window(hor_degree, ed);
    Sampler smp(seed, keys);
    CheckAccumulator degree("degree"), leibniz("graded_leibniz"), herm("hermitian"), square("square_zero"),
        rel("relations"), base("restricts_to_dM");
    auto show = [&](const VHKey& k) { return vh.str(vh.element(k)); };

    for (const VHKey& k : keys) {
        const VHElement x = vh.element(k);
        const VHElement dx = dd.apply(x);
        degree.expect_lazy(dx.is_zero() || vh.grade(dx) == vh.grade(k) + 1, [&] { return show(k); });
        herm.expect_lazy(dd.apply(vh.star(x)) == vh.star(dx), [&] { return show(k); });
        if (fits(vh, k.n + 2))
            square.expect_lazy(dd.apply(dx).is_zero(), [&] { return show(k) + " ↦ " + vh.str(dd.apply(dx)); });
    }
    for (int t = 0; t < 40; ++t) {
        const VHKey a = smp.key(), b = smp.key();
        if (!fits(vh, a.n + b.n + 1)) continue;
        const VHElement x = vh.element(a), y = vh.element(b);
        const VHElement lhs = dd.apply(vh.multiply(x, y));
        const VHElement rhs =
            vh.multiply(dd.apply(x), y) + Scalar(sign_of(vh.grade(a))) * vh.multiply(x, dd.apply(y));
        leibniz.expect_lazy(lhs == rhs, [&] { return show(a) + " · " + show(b); });
    }
    const int top = vh.vanishes_above() ? vh.max_degree() : vh.max_degree() - 1;
    for (int n = 2; n <= top; ++n)
        for (const SparseVec& r : vh.envelope()->relations(n))
            rel.expect_lazy(dd.apply_raw(Word(), n, r).is_zero(),
                            [&] { return vh.envelope()->str(n, r); });
    const Bundle& b = *vh.bundle();
    for (size_t i = 0; i < b.base_generators().size(); ++i) {
        const Word w(1, static_cast<char>(b.base_indices()[i]));
        base.expect_lazy(dd.on_hor(w) == vh.hor(b.base_differential()[i]), [&] { return H->word_str(w); });
    }
    for (auto* c : {&degree, &leibniz, &herm, &square, &rel, &base}) c->commit(rep);
    return rep;
}

Report verify_gauge(const ChartFamily& f, int hor_degree, unsigned long long seed) {
    Report rep;
    const VHAlgebra& vh = *f.vh();
    const auto keys = vh.window(hor_degree, vh.max_degree());
    Sampler smp(seed, keys);
    CheckAccumulator ident("identity"), cocycle("composition"), herm("hermitian"), mult("multiplicative"),
        inter("intertwines_differentials"), rel("relations");
    auto show = [&](const VHKey& k) { return vh.str(vh.element(k)); };
    const int n = f.size();
    for (const VHKey& k : keys) {
        const VHElement x = vh.element(k);
        for (int i = 0; i < n; ++i) ident.expect_lazy(f.transition(i, i).apply(x) == x, [&] { return show(k); });
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const GaugeMap& h = f.transition(i, j);
                const VHElement hx = h.apply(x);
                herm.expect_lazy(h.apply(vh.star(x)) == vh.star(hx), [&] { return h.label() + ": " + show(k); });
                if (fits(vh, k.n + 1))
                    inter.expect_lazy(h.apply(f.differential(i).apply(x)) == f.differential(j).apply(hx),
                                      [&] { return h.label() + ": " + show(k); });
                for (int l = 0; l < n; ++l)
                    cocycle.expect_lazy(f.transition(j, l).apply(hx) == f.transition(i, l).apply(x),
                                        [&] { return show(k); });
            }
    }
    for (int t = 0; t < 30; ++t) {
        const VHKey a = smp.key(), b = smp.key();
        if (!fits(vh, a.n + b.n)) continue;
        const VHElement x = vh.element(a), y = vh.element(b);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const GaugeMap& h = f.transition(i, j);
                mult.expect_lazy(h.apply(vh.multiply(x, y)) == vh.multiply(h.apply(x), h.apply(y)),
                                 [&] { return h.label() + ": " + show(a) + " · " + show(b); });
            }
    }
    for (int m = 2; m <= vh.max_degree(); ++m)
        for (const SparseVec& r : vh.envelope()->relations(m))
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    rel.expect_lazy(f.transition(i, j).apply_raw(Word(), m, r).is_zero(),
                                    [&] { return vh.envelope()->str(m, r); });
    for (auto* c : {&ident, &cocycle, &herm, &mult, &inter, &rel}) c->commit(rep);
    return rep;
}

Report verify_gluing(const ChartFamily& f, int hor_degree, unsigned long long seed) {
    Report rep;
    const VHAlgebra& vh = *f.vh();
    const FHat F(f.vh());
    const int ed = vh.vanishes_above() ? vh.max_degree() : vh.max_degree() - 1;
    const auto keys = vh.window(hor_degree, ed);
    Sampler smp(seed, keys);
    CheckAccumulator dind("d_chart_independent"), pind("product_chart_independent"), find("fhat_chart_independent"),
        fmul("fhat_multiplicative"), fd("fhat_differential"), horiz("horizontality");
    auto show = [&](const VHKey& k) { return vh.str(vh.element(k)); };
    const int n = f.size();

    for (const VHKey& k : keys) {
        const VHElement x = vh.element(k);
        const FElement fx = F.apply(x);
        for (int i = 0; i < n; ++i) {
            const GluedForm g{i, x};
            for (int j = 0; j < n; ++j) {
                dind.expect_lazy(f.glue(f.d(g), j).x == f.d(f.glue(g, j)).x, [&] { return show(k); });
                find.expect_lazy(F.gauge(f.transition(i, j), fx) == F.apply(f.transition(i, j).apply(x)),
                                 [&] { return show(k); });
            }
            fd.expect_lazy(F.apply(f.differential(i).apply(x)) == F.differential(f.differential(i), fx),
                           [&] { return show(k); });
        }
    }
    for (int t = 0; t < 30; ++t) {
        const VHKey a = smp.key(), b = smp.key();
        if (!fits(vh, a.n + b.n)) continue;
        const VHElement x = vh.element(a), y = vh.element(b);
        fmul.expect_lazy(F.apply(vh.multiply(x, y)) == F.multiply(F.apply(x), F.apply(y)),
                         [&] { return show(a) + " · " + show(b); });
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const GluedForm gx{i, x}, gy{i, y};
                pind.expect_lazy(f.glue(f.multiply(gx, gy), j).x == f.multiply(f.glue(gx, j), f.glue(gy, j)).x,
                                 [&] { return show(a) + " · " + show(b); });
            }
    }
    // F̂⁻¹(Ω_P ⊗ 𝒜) is spanned by the horizontal keys.
    {
        Indexer<FKey> ix;
        std::vector<SparseVec> images;
        std::vector<SparseVec> expected;
        for (size_t i = 0; i < keys.size(); ++i) {
            images.push_back(coords(ix, F.vertical_part(F.apply(vh.element(keys[i]))).terms));
            if (keys[i].n == 0) expected.push_back(sv_unit(static_cast<int>(i)));
        }
        const auto ker = kernel_of(images);
        horiz.expect(same_span(ker, expected), "kernel dimension " + std::to_string(ker.size()) + ", horizontal keys " +
                                                   std::to_string(expected.size()));
    }
    for (auto* c : {&dind, &pind, &find, &fmul, &fd, &horiz}) c->commit(rep);
    return rep;
}

Report verify_connections(const ChartFamily& f, int hor_degree) {
    Report rep;
    const VHAlgebra& vh = *f.vh();
    const Bundle& b = *vh.bundle();
    const auto& H = b.hor();
    const auto& A = b.algebra();
    const auto& s = *vh.calculus();
    const int d = vh.dim();
    const auto words = H->window(hor_degree);
    CheckAccumulator reg("regular"), quad("kills_quadratic_relations"), dom("D_equals_D_omega"),
        diff("difference_is_chi");
    std::vector<SparseVec> quadratic = vh.envelope()->relations(2);
    if (vh.variant() == EnvelopeVariant::wedge) quadratic = vh.envelope()->quadratic_relations();

    for (int i = 0; i < f.size(); ++i)
        for (int j = 0; j < f.size(); ++j) {
            const GaugeMap& h = f.transition(i, j);
            auto omega = [&](const SparseVec& v) { return h.apply(vh.vert(1, v)); };
            const std::string tag = f.chart(i).label() + " in chart " + f.chart(j).label();
            for (const Word& w : words) {
                const Scalar sw(sign_of(H->word_grade(w)));
                const TensorElement& F = b.coact_word(w);
                for (int e = 0; e < d; ++e) {
                    VHElement rhs;
                    for (const auto& [key, cf] : F.terms())
                        rhs += (sw * cf) * vh.multiply(vh.hor(AlgElement::word(H, key[0])),
                                                       omega(s.circ(sv_unit(e), AlgElement::word(A, key[1]))));
                    reg.expect_lazy(vh.multiply(omega(sv_unit(e)), vh.hor(AlgElement::word(H, w))) == rhs,
                                    [&] { return tag + ": " + s.basis_label(e) + " · " + H->word_str(w); });
                }
                // D_ω(φ) = d_P φ − (−1)^{∂φ} Σ φ_k ω(π(c_k)).
                VHElement dw = f.differential(j).on_hor(w);
                for (const auto& [key, cf] : F.terms()) {
                    const SparseVec p = pi_word(s, key[1]);
                    if (p.empty()) continue;
                    dw -= (sw * cf) * vh.multiply(vh.hor(AlgElement::word(H, key[0])), omega(p));
                }
                dom.expect_lazy(dw == vh.hor(f.chart(i).apply_word(w)),
                                [&] { return tag + ": " + H->word_str(w) + " gives " + vh.str(dw); });
            }
            for (const SparseVec& q : quadratic) {
                VHElement sum;
                for (const auto& [flat, c] : q)
                    sum += c * vh.multiply(omega(sv_unit(flat / d)), omega(sv_unit(flat % d)));
                if (fits(vh, 2)) quad.expect_lazy(sum.is_zero(), [&] { return tag + ": " + vh.str(sum); });
            }
            if (i != j) {
                const GaugeMap direct = f.gauge(f.chart(j) - f.chart(i));
                for (int e = 0; e < d; ++e)
                    diff.expect_lazy(vh.gen(e) - omega(sv_unit(e)) == vh.hor(direct.chi()[e]),
                                     [&] { return tag + ": " + s.basis_label(e); });
            }
        }
    for (auto* c : {&reg, &quad, &dom, &diff}) c->commit(rep);
    return rep;
}

Report exterior_variant_suite(BundlePtr b, CalculusPtr s, const std::vector<Derivation>& charts,
                              const MultipletTable& m, int n_max, int hor_degree, int witness_length) {
    Report rep;
    const int d = s->dim();
    const auto& H = b->hor();
    auto braid = std::make_shared<const BraidOperator>(s);
    const Antisymmetrizers anti(braid, std::max(antisymmetrizer_budget(), n_max));
    auto total = [&](int k) { return k <= 1 ? Matrix::identity(ipow(d, k)) : anti.total(k); };
    auto shuffle = [&](int k, int l) { return k == 0 || l == 0 ? Matrix::identity(ipow(d, k + l)) : anti.shuffle(k, l); };
    std::vector<Scalar> inv_fact = {Scalar(1)};
    for (int k = 1; k <= n_max; ++k) inv_fact.push_back(inv_fact.back() / Scalar(k));

    // ⨿_P over the tensor algebra.
    auto tvh = std::make_shared<const VHAlgebra>(b, std::make_shared<const Envelope>(s, EnvelopeVariant::tensor, n_max));
    const ChartFamily tf(tvh, charts, m, witness_length);
    CheckAccumulator shuf("h_star_shuffle_form"), tot("h_star_total_form"), stab("h_star_keeps_kernel");
    // (χ^{⊗k}⊗id) on a raw degree-n tensor.
    auto split = [&](const std::vector<AlgElement>& chi, int n, int k, const SparseVec& u, const Scalar& scale) {
        VHElement r;
        for (const auto& [flat, c] : u) {
            const auto mi = multi_index(flat, d, n);
            AlgElement p = AlgElement::unit(H);
            for (int t = 0; t < k; ++t) p = p * chi[mi[t]];
            if (p.is_zero()) continue;
            const std::vector<int> tail(mi.begin() + k, mi.end());
            r += (c * scale) * tvh->pure(p, n - k, sv_unit(flat_index(tail, d)));
        }
        return r;
    };
    for (int i = 0; i < tf.size(); ++i)
        for (int j = 0; j < tf.size(); ++j) {
            const auto& chi = tf.transition(i, j).chi();
            std::vector<AlgElement> neg;
            for (const auto& c : chi) neg.push_back(-c);
            const GaugeMap hminus(tvh, neg, "-" + tf.transition(i, j).label());
            const std::string tag = tf.transition(i, j).label();
            for (int n = 1; n <= n_max; ++n) {
                for (int flat = 0; flat < ipow(d, n); ++flat) {
                    const SparseVec v = sv_unit(flat);
                    const VHElement direct = hminus.apply(tvh->vert(n, v));
                    VHElement a, bsum;
                    for (int k = 0; k <= n; ++k) {
                        const SparseVec akl = shuffle(k, n - k).apply(v);
                        a += split(chi, n, k, akl, Scalar(1));
                        const SparseVec tk = kron(total(k), Matrix::identity(ipow(d, n - k))).apply(akl);
                        bsum += split(chi, n, k, tk, inv_fact[k]);
                    }
                    shuf.expect_lazy(a == direct, [&] { return tag + ": " + tvh->str(direct) + " vs " + tvh->str(a); });
                    tot.expect_lazy(bsum == direct,
                                    [&] { return tag + ": " + tvh->str(direct) + " vs " + tvh->str(bsum); });
                }
                if (n < 2) continue;
                for (const SparseVec& v : anti.kernel(n)) {
                    const VHElement img = hminus.apply(tvh->vert(n, v));
                    std::map<std::pair<Word, int>, std::map<int, Scalar>> comps;
                    for (const auto& [k, c] : img.terms) comps[{k.hor, k.n}][k.flat] += c;
                    for (const auto& [wl, comp] : comps) {
                        const SparseVec cv = sv_from_map(comp);
                        const bool ok = cv.empty() || (wl.second >= 2 && total(wl.second).apply(cv).empty());
                        stab.expect_lazy(ok, [&] { return tag + ": component " + H->word_str(wl.first) + " in degree " +
                                                          std::to_string(wl.second); });
                    }
                }
            }
        }
    for (auto* c : {&shuf, &tot, &stab}) c->commit(rep);

    // Υ_P = hor ⊗ [ker A]^∧ inside the wedge vh algebra.
    auto wenv = std::make_shared<const Envelope>(s, EnvelopeVariant::wedge, n_max);
    const Envelope venv(s, EnvelopeVariant::vee, n_max);
    auto wvh = std::make_shared<const VHAlgebra>(b, wenv);
    const ChartFamily wf(wvh, charts, m, witness_length);
    CheckAccumulator ug("upsilon_gauge_stable"), ud("upsilon_d_stable"), quot("vee_is_wedge_mod_upsilon");
    auto in_upsilon = [&](const VHElement& x) {
        std::map<std::pair<Word, int>, std::map<int, Scalar>> comps;
        for (const auto& [k, c] : x.terms) comps[{k.hor, k.n}][k.flat] += c;
        for (const auto& [wl, comp] : comps) {
            const SparseVec cv = sv_from_map(comp);
            if (cv.empty()) continue;
            if (wl.second < 2 || !total(wl.second).apply(cv).empty()) return false;
        }
        return true;
    };
    std::vector<Word> hor_words = {Word()};
    for (const Word& w : H->window(std::min(hor_degree, 1)))
        if (!w.empty()) hor_words.push_back(w);
    for (int n = 2; n <= n_max; ++n) {
        const auto ker = anti.kernel(n);
        std::vector<SparseVec> images;
        for (const SparseVec& v : ker) images.push_back(wenv->reduce(n, v));
        quot.expect(wenv->quotient_dim(n) - rank_of(images) == venv.quotient_dim(n),
                    "degree " + std::to_string(n));
        for (const SparseVec& v : ker)
            for (const Word& w : hor_words) {
                const VHElement x = wvh->pure(AlgElement::word(H, w), n, v);
                if (x.is_zero()) continue;
                for (int i = 0; i < wf.size(); ++i) {
                    for (int j = 0; j < wf.size(); ++j)
                        ug.expect_lazy(in_upsilon(wf.transition(i, j).apply(x)),
                                       [&] { return wf.transition(i, j).label() + ": " + wvh->str(x); });
                    if (fits(*wvh, n + 1))
                        ud.expect_lazy(in_upsilon(wf.differential(i).apply(x)),
                                       [&] { return wf.chart(i).label() + ": " + wvh->str(x); });
                }
            }
    }
    for (auto* c : {&ug, &ud, &quot}) c->commit(rep);

    // h_E∂_D = ∂_{D+E}h_E on the vee vh algebra.
    auto vvh = std::make_shared<const VHAlgebra>(b, std::make_shared<const Envelope>(s, EnvelopeVariant::vee, n_max));
    const ChartFamily vf(vvh, charts, m, witness_length);
    CheckAccumulator vi("vee_intertwines");
    for (const VHKey& k : vvh->window(hor_degree, n_max)) {
        if (!fits(*vvh, k.n + 1)) continue;
        const VHElement x = vvh->element(k);
        for (int i = 0; i < vf.size(); ++i)
            for (int j = 0; j < vf.size(); ++j) {
                const GaugeMap& h = vf.transition(i, j);
                vi.expect_lazy(h.apply(vf.differential(i).apply(x)) == vf.differential(j).apply(h.apply(x)),
                               [&] { return h.label() + ": " + vvh->str(x); });
            }
    }
    vi.commit(rep);
    return rep;
}

}  // namespace qpb
