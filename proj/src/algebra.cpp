#include "qpb/algebra.hpp"

#include <algorithm>
#include <sstream>

namespace qpb {

void terms_add(Terms& acc, const Word& w, const Scalar& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = acc.try_emplace(w, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) acc.erase(it);
    }
}

void terms_axpy(Terms& acc, const Scalar& s, const Terms& b) {
    if (s.is_zero()) return;
    for (const auto& [w, c] : b) terms_add(acc, w, s * c);
}

int koszul_sign(const std::vector<int>& grades) {
    int odd_seen = 0;
    int parity = 0;
    for (int g : grades) {
        if (g % 2) {
            parity ^= odd_seen & 1;
            ++odd_seen;
        }
    }
    return parity ? -1 : 1;
}

Presentation::Presentation(std::string name, std::vector<Generator> gens, std::vector<Rule> rules,
                           size_t step_budget)
    : name_(std::move(name)), gens_(std::move(gens)), rules_(std::move(rules)), budget_(step_budget) {
    if (gens_.size() > 250) throw AlgebraError("too many generators in " + name_);
    for (size_t i = 0; i < gens_.size(); ++i) {
        if (!by_name_.emplace(gens_[i].name, static_cast<int>(i)).second)
            throw AlgebraError("duplicate generator '" + gens_[i].name + "'");
        if (gens_[i].grade < 0) throw AlgebraError("negative grade for '" + gens_[i].name + "'");
        if (gens_[i].grade > 0) graded_ = true;
        if (gens_[i].star < 0) has_star_ = false;
        if (gens_[i].star >= static_cast<int>(gens_.size()))
            throw AlgebraError("star partner out of range for '" + gens_[i].name + "'");
    }
    if (has_star_) {
        for (size_t i = 0; i < gens_.size(); ++i) {
            const auto& g = gens_[i];
            const auto& s = gens_[g.star];
            if (s.star != static_cast<int>(i) || s.star_sign != g.star_sign ||
                s.grade != g.grade)
                throw AlgebraError("star pairing of '" + g.name + "' is not an involution");
        }
    }
    rules_by_first_.assign(gens_.size(), {});
    WordLess less;
    for (size_t r = 0; r < rules_.size(); ++r) {
        const Rule& rule = rules_[r];
        if (rule.lhs.empty()) throw AlgebraError("rule with empty left side in " + name_);
        for (size_t i = 0; i < rule.lhs.size(); ++i)
            if (letter(rule.lhs, i) >= static_cast<int>(gens_.size()))
                throw AlgebraError("rule uses an unknown generator");
        for (const auto& [w, c] : rule.rhs) {
            if (!less(w, rule.lhs))
                throw AlgebraError("rule " + word_str(rule.lhs) + " -> " + word_str(w) +
                                   " does not decrease the word order");
        }
        rules_by_first_[letter(rule.lhs, 0)].push_back(static_cast<int>(r));
    }
}

int Presentation::index_of(const std::string& gen_name) const {
    auto it = by_name_.find(gen_name);
    if (it == by_name_.end())
        throw AlgebraError("unknown generator symbol '" + gen_name + "' in " + name_);
    return it->second;
}

std::optional<int> Presentation::find(const std::string& gen_name) const {
    auto it = by_name_.find(gen_name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

Word Presentation::parse_word(const std::string& text) const {
    std::istringstream is(text);
    std::string tok;
    Word w;
    while (is >> tok) {
        if (tok == "1") continue;
        w.push_back(static_cast<char>(index_of(tok)));
    }
    return w;
}

std::string Presentation::word_str(const Word& w) const {
    if (w.empty()) return "1";
    std::string s;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) s += ' ';
        int g = letter(w, i);
        s += g < static_cast<int>(gens_.size()) ? gens_[g].name : "?";
    }
    return s;
}

int Presentation::word_grade(const Word& w) const {
    int g = 0;
    for (size_t i = 0; i < w.size(); ++i) g += gens_[letter(w, i)].grade;
    return g;
}

std::pair<int, int> Presentation::find_redex(const Word& w, size_t from) const {
    for (size_t i = from; i < w.size(); ++i) {
        for (int r : rules_by_first_[letter(w, i)]) {
            const Word& lhs = rules_[r].lhs;
            if (lhs.size() <= w.size() - i && w.compare(i, lhs.size(), lhs) == 0)
                return {static_cast<int>(i), r};
        }
    }
    return {-1, -1};
}

bool Presentation::is_normal(const Word& w) const { return find_redex(w).first < 0; }

Terms Presentation::normal_form_uncached(const Word& w, size_t& steps) const {
    auto [pos, r] = find_redex(w);
    Terms out;
    if (pos < 0) {
        out.emplace(w, Scalar(1));
        return out;
    }
    if (++steps > budget_) throw AlgebraError("rewrite budget exceeded in " + name_);
    const Rule& rule = rules_[r];
    const Word prefix = w.substr(0, pos);
    const Word suffix = w.substr(pos + rule.lhs.size());
    for (const auto& [rw, c] : rule.rhs) {
        Word next = prefix + rw + suffix;
        Terms sub;
        bool cached = false;
        {
            std::lock_guard<std::mutex> lk(cache_mu_);
            auto it = cache_.find(next);
            if (it != cache_.end()) {
                sub = it->second;
                cached = true;
            }
        }
        if (!cached && is_normal(next)) {
            sub.emplace(next, Scalar(1));
        } else if (!cached) {
            sub = normal_form_uncached(next, steps);
            std::lock_guard<std::mutex> lk(cache_mu_);
            cache_.emplace(next, sub);
        }
        terms_axpy(out, c, sub);
    }
    return out;
}

Terms Presentation::normal_form(const Word& w) const {
    for (size_t i = 0; i < w.size(); ++i)
        if (letter(w, i) >= static_cast<int>(gens_.size()))
            throw AlgebraError("unknown generator symbol in word for " + name_);
    {
        std::lock_guard<std::mutex> lk(cache_mu_);
        auto it = cache_.find(w);
        if (it != cache_.end()) return it->second;
    }
    size_t steps = 0;
    Terms nf = normal_form_uncached(w, steps);
    std::lock_guard<std::mutex> lk(cache_mu_);
    cache_.emplace(w, nf);
    return nf;
}

Terms Presentation::normalize(const Terms& t) const {
    Terms out;
    for (const auto& [w, c] : t) {
        if (c.is_zero()) continue;
        if (rules_.empty() || is_normal(w)) {
            terms_add(out, w, c);
            continue;
        }
        terms_axpy(out, c, normal_form(w));
    }
    return out;
}

Terms Presentation::multiply(const Terms& a, const Terms& b) const {
    Terms out;
    for (const auto& [wa, ca] : a)
        for (const auto& [wb, cb] : b) {
            Word w = wa + wb;
            Scalar c = ca * cb;
            if (is_normal(w))
                terms_add(out, w, c);
            else
                terms_axpy(out, c, normal_form(w));
        }
    return out;
}

Terms Presentation::star(const Terms& t) const {
    if (!has_star_) throw AlgebraError("involution undefined in " + name_);
    Terms raw;
    for (const auto& [w, c] : t) {
        Word s;
        std::vector<int> grades;
        int sign = 1;
        for (size_t i = w.size(); i-- > 0;) {
            const Generator& g = gens_[letter(w, i)];
            s.push_back(static_cast<char>(g.star));
            sign *= g.star_sign;
        }
        for (size_t i = 0; i < w.size(); ++i) grades.push_back(gens_[letter(w, i)].grade);
        sign *= koszul_sign(grades);
        terms_add(raw, s, c.conj() * Scalar(sign));
    }
    return normalize(raw);
}

std::vector<Word> Presentation::window(int d) const {
    size_t maxlhs = 0;
    for (const auto& r : rules_) maxlhs = std::max(maxlhs, r.lhs.size());
    std::vector<Word> all{Word()};
    std::vector<Word> level{Word()};
    for (int k = 1; k <= d; ++k) {
        std::vector<Word> next;
        for (const auto& w : level)
            for (int g = 0; g < num_generators(); ++g) {
                Word x = w;
                x.push_back(static_cast<char>(g));
                size_t from = x.size() > maxlhs ? x.size() - maxlhs : 0;
                if (find_redex(x, from).first < 0) next.push_back(std::move(x));
            }
        std::sort(next.begin(), next.end(), WordLess());
        all.insert(all.end(), next.begin(), next.end());
        level = std::move(next);
    }
    return all;
}

ConfluenceReport Presentation::check_local_confluence(int degree_bound) const {
    ConfluenceReport rep;
    auto nf = [&](const Word& pre, const Terms& mid, const Word& post) {
        Terms raw;
        for (const auto& [w, c] : mid) terms_add(raw, pre + w + post, c);
        return normalize(raw);
    };
    auto record = [&](const Word& overlap, Terms l, Terms r) {
        ++rep.pairs_checked;
        if (!(l == r)) rep.unresolved.push_back({overlap, std::move(l), std::move(r)});
    };
    for (size_t i = 0; i < rules_.size(); ++i) {
        const Word& li = rules_[i].lhs;
        for (size_t j = 0; j < rules_.size(); ++j) {
            const Word& lj = rules_[j].lhs;
            // Overlaps: a proper suffix of li equals a proper prefix of lj.
            for (size_t k = 1; k < li.size() && k < lj.size(); ++k) {
                if (li.compare(li.size() - k, k, lj, 0, k) != 0) continue;
                Word overlap = li + lj.substr(k);
                if (static_cast<int>(overlap.size()) > degree_bound) continue;
                record(overlap, nf("", rules_[i].rhs, lj.substr(k)),
                       nf(li.substr(0, li.size() - k), rules_[j].rhs, ""));
            }
            // Inclusions: lj occurs inside li.
            if (i == j || lj.size() > li.size()) continue;
            if (li == lj && j < i) continue;
            if (static_cast<int>(li.size()) > degree_bound) continue;
            for (size_t p = 0; p + lj.size() <= li.size(); ++p) {
                if (li.compare(p, lj.size(), lj) != 0) continue;
                record(li, nf("", rules_[i].rhs, ""),
                       nf(li.substr(0, p), rules_[j].rhs, li.substr(p + lj.size())));
            }
        }
    }
    return rep;
}

// AlgElement

AlgElement::AlgElement(PresentationPtr p, Terms t, bool already_normal) : p_(std::move(p)) {
    if (already_normal) {
        for (auto& [w, c] : t)
            if (!c.is_zero()) t_.emplace(w, c);
    } else {
        t_ = p_->normalize(t);
    }
}

AlgElement AlgElement::unit(PresentationPtr p, const Scalar& c) { return word(std::move(p), Word(), c); }

AlgElement AlgElement::word(PresentationPtr p, const Word& w, const Scalar& c) {
    Terms t;
    terms_add(t, w, c);
    return AlgElement(std::move(p), std::move(t));
}

AlgElement AlgElement::gen(PresentationPtr p, const std::string& name) {
    Word w(1, static_cast<char>(p->index_of(name)));
    return word(std::move(p), w);
}

AlgElement AlgElement::parse(PresentationPtr p, const std::string& text) {
    Word w = p->parse_word(text);
    return word(std::move(p), w);
}

Scalar AlgElement::coeff(const Word& w) const {
    auto it = t_.find(w);
    return it == t_.end() ? Scalar(0) : it->second;
}

int AlgElement::grade() const {
    int g = -2;
    for (const auto& [w, c] : t_) {
        int x = p_->word_grade(w);
        if (g == -2)
            g = x;
        else if (g != x)
            return -1;
    }
    return g == -2 ? 0 : g;
}

int AlgElement::max_length() const {
    int m = 0;
    for (const auto& [w, c] : t_) m = std::max(m, static_cast<int>(w.size()));
    return m;
}

void AlgElement::check_same(const AlgElement& o) const {
    if (p_ && o.p_ && p_ != o.p_ && p_->name() != o.p_->name())
        throw AlgebraError("presentation mismatch: " + p_->name() + " vs " + o.p_->name());
}

AlgElement AlgElement::operator-() const {
    AlgElement r = *this;
    for (auto& [w, c] : r.t_) c = -c;
    return r;
}

AlgElement& AlgElement::operator+=(const AlgElement& o) {
    check_same(o);
    if (!p_) p_ = o.p_;
    terms_axpy(t_, Scalar(1), o.t_);
    return *this;
}

AlgElement& AlgElement::operator-=(const AlgElement& o) {
    check_same(o);
    if (!p_) p_ = o.p_;
    terms_axpy(t_, Scalar(-1), o.t_);
    return *this;
}

AlgElement operator*(const AlgElement& a, const AlgElement& b) {
    a.check_same(b);
    const PresentationPtr& p = a.p_ ? a.p_ : b.p_;
    if (!p) return AlgElement();
    return AlgElement(p, p->multiply(a.t_, b.t_), true);
}

AlgElement operator*(const Scalar& s, const AlgElement& a) {
    AlgElement r(a.p_);
    if (s.is_zero()) return r;
    for (const auto& [w, c] : a.t_) r.t_.emplace(w, s * c);
    return r;
}

AlgElement AlgElement::star() const {
    if (!p_) return *this;
    return AlgElement(p_, p_->star(t_), true);
}

AlgElement AlgElement::specialize(const Rational& q_value) const {
    AlgElement r(p_);
    for (const auto& [w, c] : t_) {
        Scalar v = c.specialize(q_value);
        if (!v.is_zero()) r.t_.emplace(w, v);
    }
    return r;
}

std::string AlgElement::str() const {
    if (t_.empty()) return "0";
    std::string s;
    bool first = true;
    for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
        if (!first) s += " + ";
        first = false;
        s += "(" + it->second.str() + ")";
        if (!it->first.empty()) s += "*" + p_->word_str(it->first);
    }
    return s;
}

// TensorElement

bool TupleLess::operator()(const Tuple& a, const Tuple& b) const {
    WordLess less;
    const size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) {
        if (less(a[i], b[i])) return true;
        if (less(b[i], a[i])) return false;
    }
    return a.size() < b.size();
}

namespace {

void add_cartesian(TensorTerms& acc, const std::vector<Terms>& legs, const Scalar& c) {
    if (c.is_zero()) return;
    for (const auto& l : legs)
        if (l.empty()) return;
    std::vector<Terms::const_iterator> it;
    for (const auto& l : legs) it.push_back(l.begin());
    const size_t n = legs.size();
    Tuple key(n);
    while (true) {
        Scalar coef = c;
        for (size_t i = 0; i < n; ++i) {
            key[i] = it[i]->first;
            coef *= it[i]->second;
        }
        auto [pos, inserted] = acc.try_emplace(key, coef);
        if (!inserted) {
            pos->second += coef;
            if (pos->second.is_zero()) acc.erase(pos);
        }
        size_t k = n;
        while (k > 0) {
            --k;
            if (++it[k] != legs[k].end()) break;
            it[k] = legs[k].begin();
            if (k == 0) return;
        }
        if (n == 0) return;
    }
}

}  // namespace

TensorElement TensorElement::pure(const std::vector<AlgElement>& factors) {
    std::vector<PresentationPtr> legs;
    std::vector<Terms> t;
    for (const auto& f : factors) {
        legs.push_back(f.presentation());
        t.push_back(f.terms());
    }
    TensorElement r(legs);
    add_cartesian(r.t_, t, Scalar(1));
    return r;
}

TensorElement TensorElement::unit(std::vector<PresentationPtr> legs) {
    TensorElement r(std::move(legs));
    r.t_.emplace(Tuple(r.legs_.size()), Scalar(1));
    return r;
}

Scalar TensorElement::coeff(const Tuple& key) const {
    auto it = t_.find(key);
    return it == t_.end() ? Scalar(0) : it->second;
}

void TensorElement::add_term(const Tuple& key, const Scalar& c) {
    if (c.is_zero()) return;
    auto [pos, inserted] = t_.try_emplace(key, c);
    if (!inserted) {
        pos->second += c;
        if (pos->second.is_zero()) t_.erase(pos);
    }
}

void TensorElement::add_product(const std::vector<Terms>& legs, const Scalar& c) {
    if (legs.size() != legs_.size()) throw AlgebraError("tensor leg count mismatch");
    std::vector<Terms> normal;
    for (size_t i = 0; i < legs.size(); ++i) normal.push_back(legs_[i]->normalize(legs[i]));
    add_cartesian(t_, normal, c);
}

void TensorElement::check_same(const TensorElement& o) const {
    if (legs_.size() != o.legs_.size()) throw AlgebraError("tensor degree mismatch");
    for (size_t i = 0; i < legs_.size(); ++i)
        if (legs_[i] != o.legs_[i] && legs_[i]->name() != o.legs_[i]->name())
            throw AlgebraError("tensor leg presentation mismatch");
}

TensorElement TensorElement::operator-() const {
    TensorElement r = *this;
    for (auto& [k, c] : r.t_) c = -c;
    return r;
}

TensorElement& TensorElement::operator+=(const TensorElement& o) {
    if (legs_.empty() && t_.empty()) legs_ = o.legs_;
    check_same(o);
    for (const auto& [k, c] : o.t_) add_term(k, c);
    return *this;
}

TensorElement& TensorElement::operator-=(const TensorElement& o) {
    if (legs_.empty() && t_.empty()) legs_ = o.legs_;
    check_same(o);
    for (const auto& [k, c] : o.t_) add_term(k, -c);
    return *this;
}

TensorElement operator*(const TensorElement& a, const TensorElement& b) {
    a.check_same(b);
    TensorElement r(a.legs_);
    const size_t n = a.legs_.size();
    std::vector<Terms> legs(n);
    for (const auto& [ka, ca] : a.t_)
        for (const auto& [kb, cb] : b.t_) {
            // Moving b_j past a_i for i > j.
            int sign = 1;
            for (size_t i = 0; i < n; ++i) {
                int ga = a.legs_[i]->word_grade(ka[i]);
                if (ga % 2 == 0) continue;
                for (size_t j = 0; j < i; ++j)
                    if (b.legs_[j]->word_grade(kb[j]) % 2) sign = -sign;
            }
            for (size_t i = 0; i < n; ++i) {
                Word w = ka[i] + kb[i];
                legs[i] = a.legs_[i]->is_normal(w) ? Terms{{w, Scalar(1)}}
                                                    : a.legs_[i]->normal_form(w);
            }
            add_cartesian(r.t_, legs, Scalar(sign) * ca * cb);
        }
    return r;
}

TensorElement operator*(const Scalar& s, const TensorElement& a) {
    TensorElement r(a.legs_);
    if (s.is_zero()) return r;
    for (const auto& [k, c] : a.t_) r.t_.emplace(k, s * c);
    return r;
}

TensorElement TensorElement::star() const {
    TensorElement r(legs_);
    const size_t n = legs_.size();
    std::vector<Terms> legs(n);
    for (const auto& [k, c] : t_) {
        std::vector<int> grades;
        for (size_t i = 0; i < n; ++i) {
            grades.push_back(legs_[i]->word_grade(k[i]));
            legs[i] = legs_[i]->star(Terms{{k[i], Scalar(1)}});
        }
        add_cartesian(r.t_, legs, Scalar(koszul_sign(grades)) * c.conj());
    }
    return r;
}

TensorElement TensorElement::specialize(const Rational& q_value) const {
    TensorElement r(legs_);
    for (const auto& [k, c] : t_) r.add_term(k, c.specialize(q_value));
    return r;
}

std::string TensorElement::str() const {
    if (t_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [k, c] : t_) {
        if (!first) s += " + ";
        first = false;
        s += "(" + c.str() + ")*[";
        for (size_t i = 0; i < k.size(); ++i) {
            if (i) s += " ⊗ ";
            s += legs_[i]->word_str(k[i]);
        }
        s += "]";
    }
    return s;
}

TensorElement tensor(const TensorElement& a, const TensorElement& b) {
    std::vector<PresentationPtr> legs = a.legs();
    legs.insert(legs.end(), b.legs().begin(), b.legs().end());
    TensorElement r(legs);
    for (const auto& [ka, ca] : a.terms())
        for (const auto& [kb, cb] : b.terms()) {
            Tuple k = ka;
            k.insert(k.end(), kb.begin(), kb.end());
            r.add_term(k, ca * cb);
        }
    return r;
}

TensorElement tensor(const AlgElement& a, const AlgElement& b) {
    return TensorElement::pure({a, b});
}

}  // namespace qpb

namespace qpb {

TensorElement map_leg(const TensorElement& t, int leg, const std::vector<PresentationPtr>& out_legs,
                      const LegMap& f) {
    const auto& in = t.legs();
    if (leg < 0 || leg >= t.degree()) throw AlgebraError("map_leg: leg out of range");
    std::vector<PresentationPtr> legs(in.begin(), in.begin() + leg);
    legs.insert(legs.end(), out_legs.begin(), out_legs.end());
    legs.insert(legs.end(), in.begin() + leg + 1, in.end());
    TensorElement r(legs);
    std::map<Word, TensorElement, WordLess> memo;
    for (const auto& [k, c] : t.terms()) {
        auto it = memo.find(k[leg]);
        if (it == memo.end()) it = memo.emplace(k[leg], f(k[leg])).first;
        for (const auto& [k2, c2] : it->second.terms()) {
            Tuple key(k.begin(), k.begin() + leg);
            key.insert(key.end(), k2.begin(), k2.end());
            key.insert(key.end(), k.begin() + leg + 1, k.end());
            r.add_term(key, c * c2);
        }
    }
    return r;
}

TensorElement multiply_legs(const TensorElement& t, int leg) {
    const auto& in = t.legs();
    if (leg < 0 || leg + 1 >= t.degree()) throw AlgebraError("multiply_legs: leg out of range");
    const PresentationPtr& p = in[leg];
    std::vector<PresentationPtr> legs(in.begin(), in.begin() + leg + 1);
    legs.insert(legs.end(), in.begin() + leg + 2, in.end());
    TensorElement r(legs);
    for (const auto& [k, c] : t.terms()) {
        Terms prod = p->normal_form(k[leg] + k[leg + 1]);
        for (const auto& [w, c2] : prod) {
            Tuple key(k.begin(), k.begin() + leg);
            key.push_back(w);
            key.insert(key.end(), k.begin() + leg + 2, k.end());
            r.add_term(key, c * c2);
        }
    }
    return r;
}

TensorElement permute_legs(const TensorElement& t, const std::vector<int>& perm) {
    const int n = t.degree();
    if (static_cast<int>(perm.size()) != n) throw AlgebraError("permute_legs: bad permutation");
    std::vector<PresentationPtr> legs;
    for (int k = 0; k < n; ++k) legs.push_back(t.legs()[perm[k]]);
    TensorElement r(legs);
    for (const auto& [k, c] : t.terms()) {
        Tuple key;
        int sign = 1;
        for (int a = 0; a < n; ++a) {
            key.push_back(k[perm[a]]);
            for (int b = a + 1; b < n; ++b)
                if (perm[a] > perm[b] && t.legs()[perm[a]]->word_grade(k[perm[a]]) % 2 &&
                    t.legs()[perm[b]]->word_grade(k[perm[b]]) % 2)
                    sign = -sign;
        }
        r.add_term(key, Scalar(sign) * c);
    }
    return r;
}

TensorElement from_alg(const AlgElement& a) {
    TensorElement r({a.presentation()});
    for (const auto& [w, c] : a.terms()) r.add_term(Tuple{w}, c);
    return r;
}

AlgElement to_alg(const TensorElement& t) {
    if (t.degree() != 1) throw AlgebraError("to_alg: expected a single leg");
    Terms terms;
    for (const auto& [k, c] : t.terms()) terms_add(terms, k[0], c);
    return AlgElement(t.legs()[0], std::move(terms), true);
}

TensorElement from_scalar(const Scalar& s) {
    TensorElement r{std::vector<PresentationPtr>{}};
    r.add_term(Tuple{}, s);
    return r;
}

Scalar to_scalar(const TensorElement& t) {
    if (t.degree() != 0) throw AlgebraError("to_scalar: expected zero legs");
    return t.coeff(Tuple{});
}

}  // namespace qpb
