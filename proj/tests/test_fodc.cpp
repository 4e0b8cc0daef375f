#include "doctest.h"
#include "qpb/fodc.hpp"
#include "qpb/presets.hpp"

using namespace qpb;

namespace {

EpsDerivation u1_weight(const HopfStructure& h) { return EpsDerivation{{Scalar(1), Scalar(-1)}}; }

AlgElement zpow(const HopfStructure& h, int k) {
    const auto& A = h.algebra();
    AlgElement r = AlgElement::unit(A);
    AlgElement g = AlgElement::gen(A, k >= 0 ? "z" : "zi");
    for (int i = 0; i < std::abs(k); ++i) r = r * g;
    return r;
}

}  // namespace

TEST_SUITE("fodc") {
    TEST_CASE("cyclic(2) universal calculus") {
        auto h = make_cyclic(2);
        const auto& A = h->algebra();
        InvariantFormSpace s(h, IdealSpec{}, 2);
        CHECK(s.dim() == 1);
        CHECK(s.stabilized());
        CHECK(s.rep_word(0) == A->parse_word("d1"));
        AlgElement dg = AlgElement::gen(A, "d1");
        CHECK(s.circ(sv_unit(0), dg) == sv_unit(0));
        CHECK(s.circ(sv_unit(0), AlgElement::unit(A)) == sv_unit(0));
        CHECK(s.star(sv_unit(0)) == sv_unit(0, Scalar(-1)));
        CHECK(s.varpi(0).size() == 1);
        CHECK(s.varpi(0).at(0) == AlgElement::unit(A));
        Report r = verify_calculus_covariance(s);
        CHECK_MESSAGE(r.ok(), r.summary());
    }

    TEST_CASE("u1 classical calculus") {
        auto h = make_u1();
        const auto& A = h->algebra();
        IdealSpec cl = classical_ideal(*h, {u1_weight(*h)}, 3);
        InvariantFormSpace s(h, cl, 3);
        CHECK(s.dim() == 1);
        CHECK(s.stabilized());
        AlgElement z = AlgElement::gen(A, "z"), one = AlgElement::unit(A);
        SparseVec e = s.project(z - one);
        CHECK(e == sv_unit(0));
        // π(z−1)∘z = π(z²−z) = π(z−1)
        CHECK(s.circ(e, z) == e);
        CHECK(s.project(z * z - z) == e);
        // π(a)* = −π(κ(a)*): for a = z−1 this is −π(z−1), which equals π(z⁻¹−1).
        CHECK(s.star(e) == sv_scale(e, Scalar(-1)));
        CHECK(s.star(e) == s.project(AlgElement::gen(A, "zi") - one));
        CHECK(s.star(s.star(e)) == e);
        CHECK(s.varpi(0).at(0) == one);
        Report r = verify_calculus_covariance(s);
        CHECK_MESSAGE(r.ok(), r.summary());
    }

    TEST_CASE("classical ideal for u1") {
        auto h = make_u1();
        const auto& A = h->algebra();
        IdealSpec cl = classical_ideal(*h, {u1_weight(*h)}, 3);
        IdealSpan span(*h, cl, Window(A, 3));
        AlgElement z = AlgElement::gen(A, "z"), zi = AlgElement::gen(A, "zi"), one = AlgElement::unit(A);
        CHECK(span.contains((z - one) * (z - one)));
        CHECK(span.contains(z + zi - Scalar(2) * one));
        CHECK_FALSE(span.contains(z - one));
        // The ideal is exactly {Σ c_k z^k : Σ c_k = 0, Σ k c_k = 0}.
        CHECK(span.dim() == 7 - 2);
        for (int k = -3; k <= 3; ++k)
            for (int l = -3; l <= 3; ++l) {
                // z^k − z^l − (k−l)(z − 1) has vanishing sums.
                AlgElement x = zpow(*h, k) - zpow(*h, l) - Scalar(k - l) * (z - one);
                CHECK(span.contains(x));
            }
        IdealSpec none = classical_ideal(*h, {}, 3);
        CHECK(none.generators.size() == 6);
        auto c2 = make_cyclic(2);
        IdealSpec zero = classical_ideal(*c2, {EpsDerivation{{Scalar(0), Scalar(0)}}}, 2);
        CHECK(same_span({Window(c2->algebra(), 2).coords(zero.generators.at(0))},
                        {Window(c2->algebra(), 2).coords(counit_kernel(*c2, 2).generators.at(0))}));
    }

    TEST_CASE("eps-derivation law is enforced") {
        auto h = make_u1();
        EpsDerivation bad{{Scalar(1), Scalar(1)}};
        CHECK_FALSE(verify_eps_derivation(*h, bad, 2));
        CHECK_THROWS_AS(classical_ideal(*h, {bad}, 2), CalculusError);
        CHECK(verify_eps_derivation(*h, u1_weight(*h), 3));
    }

    TEST_CASE("full ideal gives the zero calculus") {
        for (const auto& name : {"u1", "cyclic(3)", "su_q_2"}) {
            auto h = make_preset(name);
            InvariantFormSpace s(h, counit_kernel(*h, 2), 2);
            CHECK(s.dim() == 0);
        }
    }

    TEST_CASE("ideal generators outside ker eps are rejected") {
        auto h = make_u1();
        IdealSpec bad{{AlgElement::gen(h->algebra(), "z")}};
        CHECK_THROWS_AS(InvariantFormSpace(h, bad, 2), CalculusError);
    }

    TEST_CASE("cyclic(n) coadjoint coaction is trivial") {
        for (int n : {2, 3, 4}) {
            auto h = make_cyclic(n);
            InvariantFormSpace s(h, IdealSpec{}, 1);
            CHECK(s.dim() == n - 1);
            for (int i = 0; i < s.dim(); ++i) {
                CHECK(s.varpi(i).size() == 1);
                CHECK(s.varpi(i).at(i) == AlgElement::unit(h->algebra()));
            }
            Report r = verify_calculus_covariance(s);
            CHECK_MESSAGE(r.ok(), r.summary());
        }
    }

    TEST_CASE("su_q_2 ideal generated by alpha - 1 is not ad-invariant") {
        auto h = make_su_q_2();
        const auto& A = h->algebra();
        IdealSpec spec{{AlgElement::gen(A, "alpha") - AlgElement::unit(A)}};
        InvariantFormSpace s(h, spec, 1);
        CHECK_FALSE(s.bicovariant());
        Report r = verify_calculus_covariance(s);
        CHECK_FALSE(r.passed("ad_invariance"));
        CHECK_FALSE(r.find("ad_invariance")->witness.empty());
    }

    TEST_CASE("s3 transposition calculus has a nontrivial coaction") {
        auto h = make_s3();
        const auto& A = h->algebra();
        // R is spanned by the delta functions of the two 3-cycles.
        IdealSpec spec{{AlgElement::gen(A, "d4"), AlgElement::gen(A, "d5")}};
        InvariantFormSpace s(h, spec, 1);
        CHECK(s.dim() == 3);
        CHECK(s.bicovariant());
        bool nontrivial = false;
        for (int i = 0; i < 3; ++i) nontrivial = nontrivial || s.varpi(i).size() > 1;
        CHECK(nontrivial);
        Report r = verify_calculus_covariance(s);
        CHECK_MESSAGE(r.ok(), r.summary());
    }
}
