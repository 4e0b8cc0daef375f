#include "doctest.h"
#include "qpb/presets.hpp"
#include "qpb/vh.hpp"

using namespace qpb;

namespace {

EpsDerivation u1_x() { return EpsDerivation{{Scalar(1), Scalar(-1)}}; }

void require_ok(const Report& r) {
    INFO(r.summary());
    CHECK(r.ok());
}

struct U1Bed {
    BundlePtr b;
    CalculusPtr s;
    MultipletTable m;
    std::vector<Derivation> charts;
};

Derivation u1_chart(const Bundle& b, int l1, int l2, const std::string& label) {
    const auto forms = trivial_bundle_forms(b);
    return trivial_preconnection(b, {u1_x()}, {Scalar(l1) * forms[0] + Scalar(l2) * forms[1]}, label);
}

// The calculus of the trivial u1 bundle cut out by the preconnections themselves.
U1Bed u1_bed() {
    U1Bed bed;
    auto G = make_u1();
    bed.b = make_trivial_bundle(G);
    bed.m = u1_multiplets(*bed.b, 12);
    bed.charts = {u1_chart(*bed.b, 0, 0, "D0"), u1_chart(*bed.b, 1, 0, "D1"), u1_chart(*bed.b, 2, -1, "D2")};
    const IdealFamily fam = hat_R(bed.b, bed.charts, {}, bed.m, 4);
    bed.s = std::make_shared<const InvariantFormSpace>(G, fam.spec(), 4);
    return bed;
}

// R = (z−1)²(z−q)𝒜 ⊆ ℛ̂: two-dimensional, with a nontrivial ∘.
U1Bed u1_q_bed() {
    U1Bed bed = u1_bed();
    auto G = bed.b->structure();
    const auto& A = G->algebra();
    const AlgElement z = AlgElement::gen(A, "z"), one = AlgElement::unit(A);
    const AlgElement g = (z - one) * (z - one) * (z - Scalar::q() * one);
    bed.s = std::make_shared<const InvariantFormSpace>(G, IdealSpec{{g}, "right"}, 5);
    return bed;
}

}  // namespace

TEST_SUITE("vh") {
    TEST_CASE("u1 classical calculus: algebra, differential, gauge") {
        const U1Bed bed = u1_bed();
        REQUIRE(bed.s->dim() == 1);
        for (auto v : {EnvelopeVariant::wedge, EnvelopeVariant::vee}) {
            CAPTURE(variant_name(v));
            auto vh = std::make_shared<const VHAlgebra>(bed.b, std::make_shared<const Envelope>(bed.s, v, 2));
            CHECK(vh->vanishes_above());
            require_ok(verify_vh_algebra(*vh, 2, 1));
            const ChartFamily f(vh, bed.charts, bed.m);
            require_ok(f.verify_descent());
            for (int i = 0; i < f.size(); ++i) require_ok(verify_differential(f, i, 2));
            require_ok(verify_gauge(f, 2));
            require_ok(verify_gluing(f, 1));
            require_ok(verify_connections(f, 2));

            // ∂_{D1}(z⊗1) = θz⊗1 + z⊗e; χ♮(z − 1) = −θ, so h_{D1−D0}(e) = e + θ.
            const auto& H = bed.b->hor();
            const AlgElement z = AlgElement::gen(H, "z"), th = AlgElement::gen(H, "theta");
            CHECK(f.differential(1).apply(vh->hor(z)) == vh->hor(th * z) + vh->pure(z, 1, sv_unit(0)));
            CHECK(f.transition(0, 1).apply(vh->gen(0)) == vh->gen(0) + vh->hor(th));

            // (1⊗e)(1⊗e) = 0, (1⊗e)* = 1⊗e* and 1⊗e is not horizontal.
            CHECK(vh->multiply(vh->gen(0), vh->gen(0)).is_zero());
            CHECK(vh->star(vh->gen(0)) == vh->vert(1, bed.s->star(sv_unit(0))));
            const FHat F(vh);
            CHECK(!F.vertical_part(F.apply(vh->gen(0))).is_zero());
            CHECK(F.vertical_part(F.apply(vh->hor(z * th))).is_zero());

            // Negative controls: ∂_{D1} without its curvature term, and h with χ of the wrong sign.
            const VHDifferential flat(vh, bed.charts[1], {AlgElement(H)});
            CHECK(!flat.apply(flat.apply(vh->hor(z))).is_zero());
            const GaugeMap wrong(vh, {-f.transition(0, 1).chi()[0]});
            CHECK(wrong.apply(f.differential(0).apply(vh->hor(z))) != f.differential(1).apply(wrong.apply(vh->hor(z))));
        }
    }

    TEST_CASE("u1 q-calculus") {
        const U1Bed bed = u1_q_bed();
        REQUIRE(bed.s->dim() == 2);
        auto vh = std::make_shared<const VHAlgebra>(bed.b, std::make_shared<const Envelope>(bed.s, EnvelopeVariant::wedge, 3));
        require_ok(verify_vh_algebra(*vh, 1, 2));
        const ChartFamily f(vh, bed.charts, bed.m);
        require_ok(f.verify_descent());
        require_ok(verify_differential(f, 1, 1));
        require_ok(verify_gauge(f, 1));
        require_ok(verify_gluing(f, 1));
        require_ok(verify_connections(f, 1));
        require_ok(exterior_variant_suite(bed.b, bed.s, bed.charts, bed.m, 3, 1));
    }

    TEST_CASE("s3 transpositions: braided vh algebra") {
        auto G = make_s3();
        const auto& A = G->algebra();
        auto b = make_trivial_bundle(G);
        auto s = std::make_shared<const InvariantFormSpace>(
            G, IdealSpec{{AlgElement::gen(A, "d4"), AlgElement::gen(A, "d5")}}, 1);
        const std::vector<Derivation> charts = {trivial_preconnection(*b, {}, {}, "D0")};
        for (auto v : {EnvelopeVariant::wedge, EnvelopeVariant::vee}) {
            CAPTURE(variant_name(v));
            auto vh = std::make_shared<const VHAlgebra>(b, std::make_shared<const Envelope>(s, v, 3));
            require_ok(verify_vh_algebra(*vh, 1, 1));
            const ChartFamily f(vh, charts, MultipletTable{}, 2);
            require_ok(f.verify_descent());
            require_ok(verify_differential(f, 0, 1));
            require_ok(verify_gauge(f, 1));
            require_ok(verify_gluing(f, 1));
            require_ok(verify_connections(f, 1));
        }
        require_ok(exterior_variant_suite(b, s, charts, MultipletTable{}, 3, 1, 2));
    }

    TEST_CASE("degree overflow") {
        auto G = make_s3();
        const auto& A = G->algebra();
        auto b = make_trivial_bundle(G);
        auto s = std::make_shared<const InvariantFormSpace>(
            G, IdealSpec{{AlgElement::gen(A, "d4"), AlgElement::gen(A, "d5")}}, 1);
        VHAlgebra vh(b, std::make_shared<const Envelope>(s, EnvelopeVariant::vee, 2));
        CHECK(!vh.vanishes_above());
        const VHElement x = vh.multiply(vh.gen(0), vh.gen(1));
        CHECK_THROWS_AS(vh.multiply(x, vh.gen(0)), VHError);
    }
}
