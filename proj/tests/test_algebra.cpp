#include <random>

#include "doctest.h"
#include "qpb/presets.hpp"

using namespace qpb;

namespace {

AlgElement random_element(std::mt19937_64& rng, const PresentationPtr& p, int degree, int terms) {
    auto win = p->window(degree);
    std::uniform_int_distribution<size_t> pick(0, win.size() - 1);
    std::uniform_int_distribution<int> coef(-3, 3);
    AlgElement a(p);
    for (int i = 0; i < terms; ++i) a += AlgElement::word(p, win[pick(rng)], Scalar(coef(rng)));
    return a;
}

// Normal form of a raw word computed by a different strategy: repeatedly
// rewrite the rightmost redex and collect terms.
Terms rightmost_normal_form(const Presentation& p, const Word& w) {
    Terms pending{{w, Scalar(1)}}, done;
    while (!pending.empty()) {
        auto it = std::prev(pending.end());
        Word cur = it->first;
        Scalar c = it->second;
        pending.erase(it);
        int pos = -1, rule = -1;
        for (int i = static_cast<int>(cur.size()) - 1; i >= 0 && pos < 0; --i)
            for (size_t r = 0; r < p.rules().size(); ++r) {
                const Word& l = p.rules()[r].lhs;
                if (i + l.size() <= cur.size() && cur.compare(i, l.size(), l) == 0) {
                    pos = i;
                    rule = static_cast<int>(r);
                    break;
                }
            }
        if (pos < 0) {
            terms_add(done, cur, c);
            continue;
        }
        const Rule& R = p.rules()[rule];
        for (const auto& [rw, rc] : R.rhs)
            terms_add(pending, cur.substr(0, pos) + rw + cur.substr(pos + R.lhs.size()), c * rc);
    }
    return done;
}

}  // namespace

TEST_SUITE("algebra") {
    TEST_CASE("normalize examples") {
        auto su = make_su_q_2();
        const auto& A = su->algebra();
        AlgElement x = AlgElement::gen(A, "alpha");
        CHECK((x - x).is_zero());
        CHECK(AlgElement::unit(A) == AlgElement::word(A, Word()));
        AlgElement a = AlgElement::gen(A, "alpha"), g = AlgElement::gen(A, "gamma");
        // The preset rewrites alpha·gamma into q·gamma·alpha.
        CHECK((a * g - Scalar::q() * (g * a)).is_zero());
        CHECK((a * g).terms().size() == 1);
        CHECK((a * g).coeff(A->parse_word("gamma alpha")) == Scalar::q());
        CHECK(AlgElement::unit(A) * a == a);
    }

    TEST_CASE("unknown generator is rejected") {
        auto u = make_u1();
        CHECK_THROWS_AS(u->algebra()->parse_word("w"), AlgebraError);
    }

    TEST_CASE("rules must decrease the order") {
        std::vector<Generator> gens = {{"x", 0, 0, 1}, {"y", 0, 1, 1}};
        Terms rhs{{word_of({1, 0}), Scalar(1)}};
        CHECK_THROWS_AS(Presentation("bad", gens, {{word_of({0, 1}), rhs}}), AlgebraError);
    }

    TEST_CASE("cyclic(2) idempotents") {
        auto c2 = make_cyclic(2);
        const auto& A = c2->algebra();
        AlgElement d = AlgElement::gen(A, "d1");
        CHECK(d * d == d);
        AlgElement de = AlgElement::gen(A, "d0");
        CHECK(de * d == AlgElement(A));
        CHECK(de * de == de);
        CHECK(de + d == AlgElement::unit(A));
    }

    TEST_CASE("star laws") {
        auto su = make_su_q_2();
        const auto& A = su->algebra();
        AlgElement a = AlgElement::gen(A, "alpha");
        CHECK(a.star() == AlgElement::gen(A, "alpha*"));
        CHECK(AlgElement::unit(A).star() == AlgElement::unit(A));
        std::mt19937_64 rng(1);
        for (int i = 0; i < 40; ++i) {
            AlgElement x = random_element(rng, A, 3, 3), y = random_element(rng, A, 3, 3);
            CHECK(x.star().star() == x);
            CHECK((x * y).star() == y.star() * x.star());
        }
    }

    TEST_CASE("ring laws on window triples") {
        for (const auto& name : {"u1", "su_q_2", "cyclic(3)"}) {
            auto h = make_preset(name);
            const auto& A = h->algebra();
            auto win = A->window(2);
            for (const auto& a : win)
                for (const auto& b : win)
                    for (const auto& c : win) {
                        AlgElement x = AlgElement::word(A, a), y = AlgElement::word(A, b),
                                   z = AlgElement::word(A, c);
                        CHECK((x * y) * z == x * (y * z));
                        CHECK(x * (y + z) == x * y + x * z);
                    }
        }
    }

    TEST_CASE("confluence oracle on random words") {
        auto su = make_su_q_2();
        const auto& A = su->algebra();
        std::mt19937_64 rng(9);
        std::uniform_int_distribution<int> gen(0, 3), len(0, 6);
        for (int i = 0; i < 200; ++i) {
            Word w;
            for (int k = len(rng); k > 0; --k) w.push_back(static_cast<char>(gen(rng)));
            CHECK(A->normal_form(w) == rightmost_normal_form(*A, w));
        }
        std::mt19937_64 rng2(10);
        for (int i = 0; i < 40; ++i) {
            AlgElement x = random_element(rng2, A, 3, 3), y = random_element(rng2, A, 3, 3);
            // Products of normalized operands equal normalized products of raw concatenations.
            Terms raw;
            for (const auto& [wa, ca] : x.terms())
                for (const auto& [wb, cb] : y.terms()) terms_add(raw, wa + wb, ca * cb);
            CHECK(AlgElement(A, raw) == x * y);
            CHECK(AlgElement(A, (x * y).terms()) == x * y);
        }
    }

    TEST_CASE("local confluence of presets") {
        for (const auto& name : preset_names()) {
            auto h = make_preset(name);
            auto rep = h->algebra()->check_local_confluence(4);
            CHECK_MESSAGE(rep.ok(), name);
            CHECK(rep.pairs_checked > 0);
        }
        std::vector<Generator> gens = {{"x", 0, 0, 1}, {"y", 0, 1, 1}};
        std::vector<Rule> broken = {{word_of({0, 1}), Terms{{Word(), Scalar(1)}}},
                                    {word_of({0, 1}), Terms{{word_of({0}), Scalar(1)}}}};
        Presentation p("broken", gens, broken);
        auto rep = p.check_local_confluence(4);
        CHECK(rep.unresolved.size() == 1);
    }

    TEST_CASE("specialize") {
        auto su = make_su_q_2();
        const auto& A = su->algebra();
        AlgElement w = AlgElement::gen(A, "gamma");
        CHECK((Scalar::q() * w).specialize(1) == w);
        Scalar f = (Scalar::q() * Scalar::q() - Scalar(1)) / (Scalar::q() - Scalar(1));
        CHECK((f * w).specialize(1) == Scalar(2) * w);
        CHECK_THROWS_AS((Scalar(1) / (Scalar::q() - Scalar(1)) * w).specialize(1), PoleError);
        std::mt19937_64 rng(4);
        for (int i = 0; i < 20; ++i) {
            AlgElement x = random_element(rng, A, 2, 3), y = random_element(rng, A, 2, 3);
            Rational q0(2);
            AlgElement lhs = (x * y).specialize(q0);
            // Multiply the specialized operands through the q-generic rules, then specialize.
            AlgElement rhs = (x.specialize(q0) * y.specialize(q0)).specialize(q0);
            CHECK(lhs == rhs);
        }
    }

    TEST_CASE("su_q_2 window size") {
        auto su = make_su_q_2();
        CHECK(su->algebra()->window(4).size() == 55);
        CHECK(make_cyclic(3)->algebra()->window(4).size() == 3);
        CHECK(make_u1()->algebra()->window(3).size() == 7);
    }

    TEST_CASE("tensor products and Koszul signs") {
        std::vector<Generator> gens = {{"t", 1, 0, 1}};
        std::vector<Rule> rules = {{word_of({0, 0}), Terms{}}};
        auto E = std::make_shared<const Presentation>("ext", gens, rules);
        AlgElement t = AlgElement::gen(E, "t"), one = AlgElement::unit(E);
        TensorElement a = tensor(one, t), b = tensor(t, one);
        // (1⊗t)(t⊗1) = -(t⊗t)
        CHECK(a * b == -tensor(t, t));
        CHECK(b * a == tensor(t, t));
        CHECK(tensor(t, t).star() == -tensor(t, t));
        CHECK(koszul_sign({1, 1, 1}) == -1);
        CHECK(koszul_sign({1, 2, 1}) == -1);
        CHECK(koszul_sign({1, 0}) == 1);
    }
}
