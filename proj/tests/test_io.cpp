#include <random>
#include <set>

#include "doctest.h"
#include "qpb/presets.hpp"
#include "qpb/suite.hpp"

using namespace qpb;

namespace {

Scalar random_scalar(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> c(-9, 9), p(0, 3);
    auto poly = [&] {
        Poly x;
        for (int i = 0; i < 3; ++i) x += Poly::monomial(Rational(c(rng), 1 + p(rng)), p(rng));
        return x;
    };
    Poly den = poly();
    if (den.is_zero()) den = Poly(Rational(1));
    return Scalar(poly(), den);
}

AlgElement random_element(const PresentationPtr& A, std::mt19937_64& rng) {
    const auto words = A->window(2);
    std::uniform_int_distribution<size_t> pick(0, words.size() - 1);
    AlgElement x(A);
    for (int i = 0; i < 4; ++i) x += random_scalar(rng) * AlgElement::word(A, words[pick(rng)]);
    return x;
}

json u1_config(json suites) {
    return {{"name", "t"}, {"bundle", {{"preset", "trivial"}, {"group", "u1"}}}, {"window", 3}, {"suites", suites}};
}

}  // namespace

TEST_SUITE("io") {
    TEST_CASE("scalar round trip and string forms") {
        std::mt19937_64 rng(11);
        for (int i = 0; i < 200; ++i) {
            const Scalar s = random_scalar(rng);
            CHECK(scalar_from_json(scalar_to_json(s)) == s);
            CHECK(scalar_from_json(json::parse(scalar_to_json(s).dump())) == s);
        }
        CHECK(scalar_from_json("3/4") == Scalar(Rational(3, 4)));
        CHECK(scalar_from_json("-2*q^3") == Scalar(-2) * Scalar::q_pow(3));
        CHECK(scalar_from_json("q + 1") == Scalar::q() + Scalar(1));
        CHECK(scalar_from_json(7) == Scalar(7));
        CHECK(Scalar(Poly::monomial(Rational(6, 2), 1)) == Scalar(3) * Scalar::q());
        CHECK_THROWS_AS(scalar_from_json(0.5), ParseError);
        CHECK_THROWS_AS(scalar_from_json("q^"), ParseError);
    }

    TEST_CASE("element, tensor and matrix round trips") {
        std::mt19937_64 rng(12);
        auto G = make_su_q_2();
        const auto& A = G->algebra();
        for (int i = 0; i < 50; ++i) {
            const AlgElement x = random_element(A, rng);
            CHECK(element_from_json(A, element_to_json(x)) == x);
        }
        for (const auto& t : G->coproduct_table()) CHECK(tensor_from_json({A, A}, tensor_to_json(t)) == t);
        CHECK(element_from_json(A, "alpha gamma") == AlgElement::gen(A, "alpha") * AlgElement::gen(A, "gamma"));
        CHECK_THROWS_AS(element_from_json(A, "beta"), ParseError);

        Matrix m(3, 2);
        m.set(0, 1, Scalar::q());
        m.set(2, 0, Scalar(Rational(-1, 3)));
        const Matrix r = matrix_from_json(matrix_to_json(m));
        CHECK(matrix_to_json(r) == matrix_to_json(m));
    }

    TEST_CASE("hopf tables round trip and specialize") {
        for (const std::string name : {"u1", "cyclic(3)", "su_q_2"}) {
            CAPTURE(name);
            auto G = make_preset(name);
            auto H = hopf_from_json(json::parse(hopf_to_json(*G).dump()));
            CHECK(hopf_to_json(*H) == hopf_to_json(*G));
            CHECK(verify_hopf_axioms(*H, 2).ok());
        }
        auto S = specialize(*make_su_q_2(), Rational(2));
        CHECK(verify_hopf_axioms(*S, 3).ok());
        CHECK(hopf_to_json(*S).dump().find("\"q") == std::string::npos);
    }

    TEST_CASE("suite contract") {
        const SuiteConfig c = suite_config_from_json(u1_config({"hopf"}));
        const Report r1 = run_suite(c), r2 = run_suite(c);
        CHECK(r1.ok());
        CHECK(r1.checks.size() > 10);
        CHECK(suite_report(c, r1, false).dump() == suite_report(c, r2, false).dump());

        const Report none = run_suite(suite_config_from_json(u1_config(json::array())));
        CHECK(none.checks.empty());
        CHECK(none.ok());

        CHECK_THROWS_AS(suite_config_from_json(u1_config({"nonsense"})), ParseError);
        json bad = u1_config({"hopf"});
        bad["window"] = 0;
        CHECK_THROWS_AS(suite_config_from_json(bad), ParseError);

        // A stage that throws becomes a failed check.
        json broken = u1_config({"hopf"});
        broken["bundle"]["group"] = "no_such_group";
        const Report e = run_suite(suite_config_from_json(broken));
        CHECK(!e.ok());
        CHECK(e.find("hopf.error") != nullptr);
    }

    TEST_CASE("corrupted antipode fails the antipode laws only") {
        json g = hopf_to_json(*make_u1());
        g["antipode"]["z"] = "z";
        g["antipode"]["zi"] = "zi";
        json cfg = u1_config({"hopf"});
        cfg["bundle"]["group"] = g;
        const Report r = run_suite(suite_config_from_json(cfg));
        CHECK(r.failures() == 2);
        CHECK(!r.passed("hopf.antipode_left"));
        CHECK(!r.passed("hopf.antipode_right"));
        CHECK(r.passed("hopf.coassociativity"));
    }

    TEST_CASE("compute commands") {
        json cfg = u1_config(json::array());
        cfg["calculus"] = json::parse(R"({"classical": [[1, -1]]})");
        const json d = dims_json(suite_config_from_json(cfg));
        CHECK(d.at("psi_inv") == 1);
        CHECK(d.at("exterior") == json({1, 1, 0, 0}));

        const BundleSetup b = bundle_from_json({{"preset", "hopf_fibration"}});
        const json w = witness_json(b, element_from_json(b.bundle->algebra(), "z"), 1);
        CHECK(w.at("found") == true);
        CHECK(w.at("verified") == true);
        std::set<std::pair<std::string, std::string>> pairs;
        for (const auto& p : w.at("pairs")) pairs.emplace(p.at("q")[0].at("word").get<std::string>(), p.at("b")[0].at("word").get<std::string>());
        CHECK(pairs == std::set<std::pair<std::string, std::string>>{{"alpha*", "alpha"}, {"gamma*", "gamma"}});

        // id − flip on C²⊗C².
        const Matrix a = matrix_from_json(trivial_braiding_table(2, 2).at("matrix"));
        Matrix expect(4, 4);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                expect.set(i * 2 + j, i * 2 + j, Scalar(1));
                expect.set(j * 2 + i, i * 2 + j, expect.at(j * 2 + i, i * 2 + j) - Scalar(1));
            }
        CHECK(matrix_to_json(a) == matrix_to_json(expect));
    }

    TEST_CASE("q specialization of a bundle") {
        const BundleSetup b = bundle_from_json({{"preset", "hopf_fibration"}}, Rational(3));
        CHECK(verify_bundle(*b.bundle, 2).ok());
        CHECK(verify_multiplets(*b.bundle, b.multiplets).ok());
        const json w = witness_json(b, element_from_json(b.bundle->algebra(), "zi"), 1);
        CHECK(w.at("verified") == true);
    }
}
