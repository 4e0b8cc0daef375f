#include "qpb/io.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

namespace qpb {

namespace {

json big(const mpz_class& z) {
    if (z.fits_slong_p()) return z.get_si();
    return z.get_str();
}

mpz_class big_from(const json& j) {
    if (j.is_number_integer()) return mpz_class(std::to_string(j.get<long long>()));
    if (j.is_string()) return mpz_class(j.get<std::string>());
    throw ParseError("expected an integer, got " + j.dump());
}

json poly_to_json(const Poly& p) {
    json out = json::array();
    const auto& c = p.coeffs();
    for (size_t k = 0; k < c.size(); ++k)
        if (c[k] != 0) out.push_back({big(c[k].get_num()), big(c[k].get_den()), static_cast<int>(k)});
    return out;
}

Scalar poly_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("polynomial must be a list of [num, den, power]");
    Scalar r(0);
    for (const auto& t : j) {
        if (!t.is_array() || t.size() != 3) throw ParseError("bad polynomial term " + t.dump());
        Rational c(big_from(t[0]), big_from(t[1]));
        c.canonicalize();
        r += Scalar(c) * Scalar::q_pow(t[2].get<int>());
    }
    return r;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

// One term c, c*q^k, q^k or -q.
Scalar parse_term(std::string t) {
    t = trim(t);
    static const std::regex re(R"(^([+-]?)\s*([0-9]+(?:/[0-9]+)?)?\s*\*?\s*(q(?:\^\(?(-?[0-9]+)\)?)?)?$)");
    std::smatch m;
    if (t.empty() || !std::regex_match(t, m, re) || (!m[2].matched && !m[3].matched))
        throw ParseError("cannot parse scalar term '" + t + "'");
    Scalar c = m[2].matched ? Scalar(parse_rational(m[2].str())) : Scalar(1);
    if (m[1].str() == "-") c = -c;
    if (m[3].matched) c *= Scalar::q_pow(m[4].matched ? std::stoi(m[4].str()) : 1);
    return c;
}

Scalar parse_scalar_string(const std::string& s) {
    Scalar r(0);
    std::string cur;
    for (size_t i = 0; i < s.size(); ++i) {
        const char ch = s[i];
        const bool sign = (ch == '+' || ch == '-') && !trim(cur).empty() && cur.back() != '^' && cur.back() != '(';
        if (sign) {
            r += parse_term(cur);
            cur.clear();
        }
        cur.push_back(ch);
    }
    return r + parse_term(cur);
}

Word word_from(const PresentationPtr& p, const json& j) {
    if (!j.is_string()) throw ParseError("word must be a string of generator names");
    try {
        return p->parse_word(j.get<std::string>());
    } catch (const std::exception& e) {
        throw ParseError(std::string("bad word '") + j.get<std::string>() + "': " + e.what());
    }
}

Terms terms_from(const PresentationPtr& p, const json& j) {
    Terms t;
    if (j.is_string()) {
        terms_add(t, word_from(p, j), Scalar(1));
        return t;
    }
    if (!j.is_array()) throw ParseError("element must be a term list");
    for (const auto& x : j) {
        if (x.is_array() && x.size() == 2) terms_add(t, word_from(p, x[1]), scalar_from_json(x[0]));
        else if (x.is_object()) terms_add(t, word_from(p, x.at("word")), scalar_from_json(x.value("coeff", json(1))));
        else throw ParseError("bad term " + x.dump());
    }
    return t;
}

json terms_to_json(const Presentation& p, const Terms& t) {
    json out = json::array();
    for (const auto& [w, c] : t) out.push_back({{"word", w.empty() ? "1" : p.word_str(w)}, {"coeff", scalar_to_json(c)}});
    return out;
}

}  // namespace

Rational parse_rational(const std::string& s) {
    try {
        Rational r(trim(s));
        r.canonicalize();
        return r;
    } catch (const std::exception&) {
        throw ParseError("not a rational number: '" + s + "'");
    }
}

json scalar_to_json(const Scalar& s) {
    return {{"num", poly_to_json(s.num())}, {"den", poly_to_json(s.den())}, {"text", s.str()}};
}

Scalar scalar_from_json(const json& j) {
    if (j.is_number_integer()) return Scalar(Rational(big_from(j)));
    if (j.is_number()) throw ParseError("floating-point scalars are not accepted: " + j.dump());
    if (j.is_string()) return parse_scalar_string(j.get<std::string>());
    if (j.is_object()) {
        const Scalar den = poly_from_json(j.at("den"));
        if (den.is_zero()) throw ParseError("zero denominator in " + j.dump());
        return poly_from_json(j.at("num")) / den;
    }
    throw ParseError("bad scalar " + j.dump());
}

json element_to_json(const AlgElement& a) { return terms_to_json(*a.presentation(), a.terms()); }

AlgElement element_from_json(const PresentationPtr& p, const json& j) { return AlgElement(p, terms_from(p, j)); }

json tensor_to_json(const TensorElement& t) {
    json out = json::array();
    for (const auto& [key, c] : t.terms()) {
        json legs = json::array();
        for (size_t i = 0; i < key.size(); ++i)
            legs.push_back(key[i].empty() ? "1" : t.legs()[i]->word_str(key[i]));
        out.push_back({{"legs", legs}, {"coeff", scalar_to_json(c)}});
    }
    return out;
}

TensorElement tensor_from_json(const std::vector<PresentationPtr>& legs, const json& j) {
    TensorElement t(legs);
    if (!j.is_array()) throw ParseError("tensor must be a term list");
    for (const auto& x : j) {
        const json& l = x.at("legs");
        if (!l.is_array() || l.size() != legs.size()) throw ParseError("wrong number of legs in " + x.dump());
        std::vector<Terms> factors;
        for (size_t i = 0; i < legs.size(); ++i) factors.push_back(Terms{{word_from(legs[i], l[i]), Scalar(1)}});
        t.add_product(factors, scalar_from_json(x.value("coeff", json(1))));
    }
    return t;
}

json presentation_to_json(const Presentation& p) {
    json gens = json::array(), order = json::array(), rules = json::array();
    for (const auto& g : p.generators()) {
        order.push_back(g.name);
        json x = {{"name", g.name}, {"grade", g.grade}};
        if (g.star >= 0) {
            x["star_partner"] = p.generators()[g.star].name;
            x["star_sign"] = g.star_sign;
        }
        gens.push_back(x);
    }
    for (const auto& r : p.rules()) rules.push_back({{"lhs", p.word_str(r.lhs)}, {"rhs", terms_to_json(p, r.rhs)}});
    return {{"name", p.name()}, {"order", order}, {"generators", gens}, {"rules", rules}};
}

PresentationPtr presentation_from_json(const json& j) {
    try {
        std::vector<std::string> order;
        if (j.contains("order"))
            order = j.at("order").get<std::vector<std::string>>();
        else
            for (const auto& g : j.at("generators")) order.push_back(g.at("name").get<std::string>());
        std::map<std::string, int> idx;
        for (size_t i = 0; i < order.size(); ++i) idx[order[i]] = static_cast<int>(i);
        std::vector<Generator> gens(order.size());
        for (size_t i = 0; i < order.size(); ++i) gens[i].name = order[i];
        for (const auto& g : j.at("generators")) {
            const std::string name = g.at("name").get<std::string>();
            if (!idx.count(name)) throw ParseError("generator '" + name + "' missing from order");
            Generator& x = gens[idx[name]];
            x.grade = g.value("grade", 0);
            if (g.contains("star_partner")) {
                const std::string partner = g.at("star_partner").get<std::string>();
                if (!idx.count(partner)) throw ParseError("unknown star partner '" + partner + "'");
                x.star = idx[partner];
                x.star_sign = g.value("star_sign", 1);
            }
        }
        // Rules are parsed against a rule-free copy so that words resolve.
        auto bare = std::make_shared<const Presentation>(j.value("name", std::string("custom")), gens,
                                                         std::vector<Rule>{});
        std::vector<Rule> rules;
        for (const auto& r : j.value("rules", json::array()))
            rules.push_back({word_from(bare, r.at("lhs")), terms_from(bare, r.at("rhs"))});
        return std::make_shared<const Presentation>(j.value("name", std::string("custom")), gens, rules);
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(std::string("bad presentation: ") + e.what());
    }
}

json hopf_to_json(const HopfStructure& h) {
    json j = presentation_to_json(*h.algebra());
    j["name"] = h.name();
    json cop = json::object(), eps = json::object(), kappa = json::object();
    const auto& gens = h.algebra()->generators();
    for (size_t g = 0; g < gens.size(); ++g) {
        cop[gens[g].name] = tensor_to_json(h.coproduct_table()[g]);
        eps[gens[g].name] = scalar_to_json(h.counit_table()[g]);
        kappa[gens[g].name] = element_to_json(h.antipode_table()[g]);
    }
    j["coproduct"] = cop;
    j["counit"] = eps;
    j["antipode"] = kappa;
    return j;
}

HopfPtr hopf_from_json(const json& j) {
    auto A = presentation_from_json(j);
    try {
        std::vector<TensorElement> cop;
        std::vector<Scalar> eps;
        std::vector<AlgElement> kappa;
        for (const auto& g : A->generators()) {
            cop.push_back(tensor_from_json({A, A}, j.at("coproduct").at(g.name)));
            eps.push_back(scalar_from_json(j.at("counit").at(g.name)));
            kappa.push_back(element_from_json(A, j.at("antipode").at(g.name)));
        }
        return std::make_shared<const HopfStructure>(j.value("name", A->name()), A, cop, eps, kappa);
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(std::string("bad Hopf tables: ") + e.what());
    }
}

json ideal_to_json(const IdealSpec& s) {
    json g = json::array();
    for (const auto& x : s.generators) g.push_back(element_to_json(x));
    return {{"generators", g}, {"mode", s.mode}};
}

IdealSpec ideal_from_json(const PresentationPtr& p, const json& j) {
    IdealSpec s;
    for (const auto& g : j.at("generators")) s.generators.push_back(element_from_json(p, g));
    s.mode = j.value("mode", std::string("right"));
    if (s.mode != "right") throw ParseError("only right ideals are supported, got '" + s.mode + "'");
    return s;
}

json matrix_to_json(const Matrix& m) {
    json e = json::array();
    for (int c = 0; c < m.cols; ++c)
        for (const auto& [r, v] : m.col[c]) e.push_back({r, c, scalar_to_json(v)});
    std::sort(e.begin(), e.end(), [](const json& a, const json& b) {
        return std::make_pair(a[0].get<int>(), a[1].get<int>()) < std::make_pair(b[0].get<int>(), b[1].get<int>());
    });
    return {{"rows", m.rows}, {"cols", m.cols}, {"entries", e}};
}

Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
    for (const auto& e : j.at("entries")) {
        const int r = e.at(0).get<int>(), c = e.at(1).get<int>();
        if (r < 0 || r >= m.rows || c < 0 || c >= m.cols) throw ParseError("matrix entry out of range: " + e.dump());
        m.set(r, c, scalar_from_json(e.at(2)));
    }
    return m;
}

json report_to_json(const Report& r, bool timing) {
    std::vector<const Check*> sorted;
    for (const auto& c : r.checks) sorted.push_back(&c);
    std::stable_sort(sorted.begin(), sorted.end(), [](const Check* a, const Check* b) { return a->name < b->name; });
    json checks = json::array();
    int pass = 0, fail = 0, skip = 0;
    for (const Check* c : sorted) {
        json x = {{"name", c->name}, {"status", status_name(c->status)}, {"cases", c->cases}};
        if (!c->witness.empty()) x["witness"] = c->witness;
        if (timing) x["seconds"] = c->seconds;
        checks.push_back(x);
        (c->status == Status::pass ? pass : c->status == Status::fail ? fail : skip)++;
    }
    return {{"checks", checks}, {"passed", pass}, {"failed", fail}, {"skipped", skip}};
}

PresentationPtr specialize(const Presentation& p, const Rational& q) {
    std::vector<Rule> rules;
    for (const auto& r : p.rules()) {
        Terms t;
        for (const auto& [w, c] : r.rhs) terms_add(t, w, c.specialize(q));
        rules.push_back({r.lhs, t});
    }
    return std::make_shared<const Presentation>(p.name(), p.generators(), rules);
}

AlgElement rebase(const AlgElement& a, const PresentationPtr& p, const Rational* q) {
    Terms t;
    for (const auto& [w, c] : a.terms()) terms_add(t, w, q ? c.specialize(*q) : c);
    return AlgElement(p, t);
}

TensorElement rebase(const TensorElement& t, const std::vector<PresentationPtr>& legs, const Rational* q) {
    TensorElement r(legs);
    for (const auto& [key, c] : t.terms()) {
        std::vector<Terms> f;
        for (const Word& w : key) f.push_back(Terms{{w, Scalar(1)}});
        r.add_product(f, q ? c.specialize(*q) : c);
    }
    return r;
}

HopfPtr specialize(const HopfStructure& h, const Rational& q) {
    auto A = specialize(*h.algebra(), q);
    std::vector<TensorElement> cop;
    std::vector<Scalar> eps;
    std::vector<AlgElement> kappa;
    for (const auto& t : h.coproduct_table()) cop.push_back(rebase(t, {A, A}, &q));
    for (const auto& e : h.counit_table()) eps.push_back(e.specialize(q));
    for (const auto& k : h.antipode_table()) kappa.push_back(rebase(k, A, &q));
    return std::make_shared<const HopfStructure>(h.name() + "@q=" + q.get_str(), A, cop, eps, kappa);
}

}  // namespace qpb
