// One line per acceptance criterion. All comparisons are exact (tolerance 0);
// the runtime bound of each criterion is part of its pass condition.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "qpb/presets.hpp"
#include "qpb/suite.hpp"

using namespace qpb;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
    void need(const Report& r, const std::string& what) {
        if (r.ok()) return;
        ok = false;
        if (detail.empty()) detail = what + ": " + first_failure(r);
    }
    void need(bool b, const std::string& what) {
        if (b) return;
        ok = false;
        if (detail.empty()) detail = what;
    }
    static std::string first_failure(const Report& r) {
        for (const auto& c : r.checks)
            if (c.status == Status::fail) return c.name + " [" + c.witness + "]";
        return {};
    }
};

EpsDerivation u1_x() { return EpsDerivation{{Scalar(1), Scalar(-1)}}; }

Derivation u1_chart(const Bundle& b, const Scalar& l1, const Scalar& l2, const std::string& label) {
    const auto forms = trivial_bundle_forms(b);
    return trivial_preconnection(b, {u1_x()}, {l1 * forms[0] + l2 * forms[1]}, label);
}

Matrix flip(int d) {
    Matrix m(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m.col[i * d + j] = sv_unit(j * d + i);
    return m;
}

long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

struct U1Bed {
    BundlePtr b;
    MultipletTable m;
    std::vector<Derivation> charts;
    CalculusPtr s;  // ℛ̂ of the charts
    CalculusPtr sq;  // (z−1)²(z−q)𝒜, a two-dimensional calculus inside ℛ̂
};

U1Bed u1_bed() {
    U1Bed bed;
    auto G = make_u1();
    bed.b = make_trivial_bundle(G);
    bed.m = u1_multiplets(*bed.b, 12);
    bed.charts = {u1_chart(*bed.b, 0, 0, "D0"), u1_chart(*bed.b, 1, 0, "D1"), u1_chart(*bed.b, 2, -1, "D2")};
    bed.s = std::make_shared<const InvariantFormSpace>(G, hat_R(bed.b, bed.charts, {}, bed.m, 4).spec(), 4);
    const auto& A = G->algebra();
    const AlgElement z = AlgElement::gen(A, "z"), one = AlgElement::unit(A);
    bed.sq = std::make_shared<const InvariantFormSpace>(
        G, IdealSpec{{(z - one) * (z - one) * (z - Scalar::q() * one)}, "right"}, 5);
    return bed;
}

CalculusPtr s3_transpositions(HopfPtr h = make_s3()) {
    const auto& A = h->algebra();
    return std::make_shared<const InvariantFormSpace>(
        h, IdealSpec{{AlgElement::gen(A, "d4"), AlgElement::gen(A, "d5")}}, 1);
}

Outcome c1() {
    Outcome o;
    for (const std::string name : {"u1", "cyclic(2)", "cyclic(3)", "su_q_2"}) {
        const auto t0 = std::chrono::steady_clock::now();
        auto G = make_preset(name);
        o.need(verify_hopf_axioms(*G, 4), name);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.need(secs < 10, name + " took " + std::to_string(secs) + " s");
    }
    return o;
}

// D_λ = d_M + λ1 θ + λ2 eθ on the 𝒜 leg; E runs over differences within the family.
Outcome c2() {
    Outcome o;
    auto b = make_trivial_bundle(make_u1());
    const auto m = u1_multiplets(*b, 12);
    const std::vector<std::pair<int, int>> lambdas = {{0, 0}, {1, 0}, {0, 1}, {2, -3}, {-1, 5}};
    const Derivation base = u1_chart(*b, 1, 2, "D(1,2)");
    for (const auto& [l1, l2] : lambdas) {
        const std::string label = "D(" + std::to_string(l1) + "," + std::to_string(l2) + ")";
        const Derivation D = u1_chart(*b, l1, l2, label);
        o.need(verify_preconnection(*b, D, 3), label);
        const Report r = verify_preconnection_lemmas(b, D, base - D, m, 3, 3);
        for (const std::string c : {"structure_DD", "structure_E", "rho_commutation", "chi_commutation", "rho_closed",
                                    "rho_covariance", "chi_covariance", "rho_star", "chi_star"})
            o.need(r.passed(c), label + " " + c + " " + Outcome::first_failure(r));
    }
    return o;
}

Outcome c3() {
    Outcome o;
    auto b = make_trivial_bundle(make_u1());
    const auto m = u1_multiplets(*b, 12);
    const Derivation D0 = u1_chart(*b, 0, 0, "D0"), D1 = u1_chart(*b, 1, 0, "D1"), D2 = u1_chart(*b, 2, -3, "D2");
    const std::vector<std::pair<Derivation, Derivation>> pairs = {{D0, D0 - D0}, {D1, D1 - D1}, {D0, D1 - D0},
                                                                  {D1, D2 - D1}, {D2, D0 - D2}};
    for (const auto& [D, E] : pairs) {
        const Report r = verify_preconnection_lemmas(b, D, E, m, 2, 3);
        o.need(r.passed("rho_sum"), D.label() + ", E: " + Outcome::first_failure(r));
    }
    // Finite structure group, witness route only.
    auto b3 = make_trivial_bundle(make_cyclic(3));
    const Derivation D3 = trivial_preconnection(*b3, {}, {}, "D0");
    o.need(verify_preconnection_lemmas(b3, D3, D3 - D3, MultipletTable{}, 2, 1, 2).passed("rho_sum"), "cyclic(3)");
    return o;
}

Outcome c4() {
    Outcome o;
    auto G = make_u1();
    auto b = make_trivial_bundle(G);
    const auto& A = G->algebra();
    const auto m = u1_multiplets(*b, 12);
    const std::vector<Derivation> family = {u1_chart(*b, 0, 0, "D0"), u1_chart(*b, 1, 0, "D1"),
                                            u1_chart(*b, 0, 1, "D2")};
    const IdealFamily fam = hat_R(b, family, {}, m, 4);
    o.need(fam.checks, "hat_R");
    const Window w(A, 4);
    std::vector<SparseVec> hat, cl, direct;
    for (const auto& x : fam.hat) hat.push_back(w.coords(x));
    for (const auto& x : classical_ideal(*G, {u1_x()}, 4).generators) cl.push_back(w.coords(x));
    // Direct description: a = Σ c_k z^k with Σ c_k = 0 and Σ k c_k = 0, i.e. the span of z^k(z−1)².
    const AlgElement z = AlgElement::gen(A, "z"), zi = AlgElement::gen(A, "zi"), one = AlgElement::unit(A);
    AlgElement p = zi * zi * zi * zi;
    for (int k = -4; k <= 2; ++k, p = p * z) direct.push_back(w.coords(p * (z - one) * (z - one)));
    o.need(same_span(hat, cl), "ℛ̂ differs from the classical ideal");
    o.need(same_span(hat, direct), "ℛ̂ differs from span z^k(z−1)²");
    const InvariantFormSpace psi(G, fam.spec(), 4);
    o.need(psi.dim() == 1, "dim Ψ_inv = " + std::to_string(psi.dim()));
    return o;
}

Outcome c5(const U1Bed& bed) {
    Outcome o;
    for (const auto& [name, s] : std::vector<std::pair<std::string, CalculusPtr>>{{"u1 q", bed.sq},
                                                                                  {"s3", s3_transpositions()}}) {
        const Report r = verify_braid_identities(BraidOperator(s), 4);
        o.need(r.passed("braid_relation"), name + " braid relation");
        o.need(r.passed("factorization"), name + " factorization " + Outcome::first_failure(r));
    }
    for (int d = 1; d <= 3; ++d) {
        const Antisymmetrizers anti(std::make_shared<const BraidOperator>(d, flip(d)));
        for (int n = 0; n <= std::min(d + 1, 4); ++n)
            o.need(anti.exterior_dim(n) == binom(d, n), "rank A_" + std::to_string(n) + " for d = " + std::to_string(d));
    }
    const Report u = exterior_variant_suite(bed.b, bed.sq, bed.charts, bed.m, 3, 1);
    auto s3 = make_trivial_bundle(make_s3());
    const Report s = exterior_variant_suite(s3, s3_transpositions(s3->structure()),
                                            {trivial_preconnection(*s3, {}, {}, "D0")}, MultipletTable{}, 3, 1, 2);
    for (const auto* r : {&u, &s})
        for (const std::string c : {"h_star_shuffle_form", "h_star_total_form", "h_star_keeps_kernel"})
            o.need(r->passed(c), c + " " + Outcome::first_failure(*r));
    return o;
}

Outcome c6(const U1Bed& bed) {
    Outcome o;
    for (auto v : {EnvelopeVariant::wedge, EnvelopeVariant::vee}) {
        const std::string name = variant_name(v);
        auto vh = std::make_shared<const VHAlgebra>(bed.b, std::make_shared<const Envelope>(bed.s, v, 2));
        o.need(verify_gauge(ChartFamily(vh, bed.charts, bed.m), 2), name);
        auto vq = std::make_shared<const VHAlgebra>(bed.b, std::make_shared<const Envelope>(bed.sq, v, 3));
        o.need(verify_gauge(ChartFamily(vq, bed.charts, bed.m), 1), name + " (q)");
    }
    return o;
}

Outcome c7(const U1Bed& bed) {
    Outcome o;
    for (auto v : {EnvelopeVariant::wedge, EnvelopeVariant::vee}) {
        const std::string name = variant_name(v);
        for (const auto& s : {bed.s, bed.sq}) {
            auto vh = std::make_shared<const VHAlgebra>(bed.b, std::make_shared<const Envelope>(s, v, 3));
            const ChartFamily f(vh, bed.charts, bed.m);
            o.need(verify_gluing(f, 1), name + " gluing");
            o.need(verify_connections(f, 2), name + " connections");
        }
    }
    return o;
}

Outcome c8() {
    Outcome o;
    auto window_witnesses = [&](const BundlePtr& b, int degree, int max_length) {
        const auto& A = b->algebra();
        for (const Word& w : A->window(degree)) {
            const AlgElement a = AlgElement::word(A, w);
            auto wit = freeness_witness(*b, a, max_length);
            o.need(wit && check_witness(*b, a, *wit), b->name() + ": " + A->word_str(w));
        }
    };
    window_witnesses(make_hopf_fibration(), 3, 3);
    for (const std::string g : {"u1", "cyclic(2)", "cyclic(3)", "s3"}) window_witnesses(make_trivial_bundle(make_preset(g)), 3, 3);
    window_witnesses(make_trivial_bundle(make_su_q_2()), 2, 2);

    auto hf = make_hopf_fibration();
    const auto& H = hf->hor();
    const AlgElement z = AlgElement::gen(hf->algebra(), "z");
    const WitnessPairs explicit_pairs = {{AlgElement::gen(H, "alpha*"), AlgElement::gen(H, "alpha")},
                                         {AlgElement::gen(H, "gamma*"), AlgElement::gen(H, "gamma")}};
    o.need(check_witness(*hf, z, explicit_pairs), "(α*,α),(γ*,γ) is not a witness for z");
    auto found = freeness_witness(*hf, z, 1);
    o.need(found.has_value() && check_witness(*hf, z, *found), "no length-one witness for z");
    return o;
}

Outcome c9(const U1Bed& bed) {
    Outcome o;
    auto c2 = make_cyclic(2);
    auto c3 = make_cyclic(3);
    auto u1 = make_u1();
    const std::vector<std::pair<std::string, CalculusPtr>> calculi = {
        {"u1 classical", std::make_shared<const InvariantFormSpace>(u1, classical_ideal(*u1, {u1_x()}, 3), 3)},
        {"u1 hat R", bed.s},
        {"u1 q", bed.sq},
        {"cyclic(2) universal", std::make_shared<const InvariantFormSpace>(c2, IdealSpec{}, 1)},
        {"cyclic(3) universal", std::make_shared<const InvariantFormSpace>(c3, IdealSpec{}, 1)},
        {"s3 transpositions", s3_transpositions()},
    };
    for (const auto& [name, s] : calculi) o.need(oracle_checks(*s, 3), name);
    // Classical antisymmetrizer kernels against the brute-force sum over permutations.
    std::mt19937_64 rng(5);
    for (int d = 1; d <= 3; ++d) {
        const Antisymmetrizers anti(std::make_shared<const BraidOperator>(d, flip(d)));
        for (int n = 2; n <= 3; ++n) {
            const Matrix brute = anti.total_bruteforce(n, rng);
            o.need(rank_bareiss(brute.col, brute.rows) == anti.exterior_dim(n), "flip d = " + std::to_string(d));
        }
    }
    return o;
}

}  // namespace

int main() {
    const U1Bed bed = u1_bed();
    struct Criterion {
        int id;
        std::string what;
        double budget;  // seconds; 0 for none
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "Hopf axioms on u1, cyclic(2), cyclic(3), su_q_2, window 4", 40, c1},
        {2, "ρ♮/χ♮ structure, commutation, closedness, covariance, star; D_λ family, degree 3", 30, c2},
        {3, "ρ♮_{D+E} = ρ♮_D + Dχ♮_E + χ♮_E χ♮_E for 5 (D,E) pairs incl. E = 0", 0, c3},
        {4, "ℛ̂ equals the classical ideal, dim Ψ_inv = 1", 30, c4},
        {5, "braid relation, A_kl factorization, rank A_n = C(d,n), h⋆ closed forms and kernel", 60, [&] { return c5(bed); }},
        {6, "gauge maps in ∧ and ∨", 60, [&] { return c6(bed); }},
        {7, "gluing, horizontality, ω_D regularity and D = D_ω", 60, [&] { return c7(bed); }},
        {8, "freeness witnesses on both bundle presets; (α*,α),(γ*,γ) for z", 10, c8},
        {9, "brute-force oracles for ideals, quotients, antisymmetrizers", 0, [&] { return c9(bed); }},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget > 0 && secs > c.budget) o.need(false, "runtime above " + std::to_string(c.budget) + " s");
        failed += !o.ok;
        std::printf("criterion %d: %s  tolerance=0 (exact)  %.2fs%s  %s%s%s\n", c.id, o.ok ? "PASS" : "FAIL", secs,
                    c.budget > 0 ? (" of " + std::to_string(static_cast<int>(c.budget)) + "s").c_str() : "",
                    c.what.c_str(), o.ok ? "" : "  -- ", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
