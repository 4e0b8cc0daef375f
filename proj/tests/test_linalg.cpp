#include <random>

#include "doctest.h"
#include "qpb/linalg.hpp"

using namespace qpb;

namespace {

std::vector<SparseVec> random_vectors(std::mt19937_64& rng, int count, int dim, bool with_q) {
    std::uniform_int_distribution<int> coef(-2, 2), pick(0, 2);
    std::vector<SparseVec> out;
    for (int i = 0; i < count; ++i) {
        std::map<int, Scalar> m;
        for (int j = 0; j < dim; ++j) {
            if (pick(rng) == 0) continue;
            Scalar c(coef(rng));
            if (with_q && pick(rng) == 1) c *= Scalar::q() + Scalar(coef(rng));
            m[j] = c;
        }
        out.push_back(sv_from_map(m));
    }
    return out;
}

}  // namespace

TEST_SUITE("linalg") {
    TEST_CASE("axpy merges and cancels") {
        SparseVec a = {{0, Scalar(1)}, {2, Scalar(3)}};
        SparseVec b = {{1, Scalar(1)}, {2, Scalar(1)}};
        SparseVec r = sv_axpy(a, Scalar(-3), b);
        CHECK(r == SparseVec{{0, Scalar(1)}, {1, Scalar(-3)}});
    }

    TEST_CASE("Gauss-Jordan rank agrees with Bareiss rank") {
        std::mt19937_64 rng(3);
        for (int it = 0; it < 40; ++it) {
            int count = 1 + it % 7, dim = 1 + (it * 3) % 6;
            auto vs = random_vectors(rng, count, dim, it % 2 == 1);
            // Append dependent combinations to make rank deficiency common.
            if (vs.size() >= 2) vs.push_back(sv_axpy(vs[0], Scalar::q(), vs[1]));
            CHECK(rank_of(vs) == rank_bareiss(vs, dim));
        }
    }

    TEST_CASE("kernel vectors annihilate and have the right count") {
        std::mt19937_64 rng(5);
        for (int it = 0; it < 30; ++it) {
            auto vs = random_vectors(rng, 6, 4, true);
            auto ker = kernel_of(vs);
            CHECK(static_cast<int>(ker.size()) == 6 - rank_of(vs));
            for (const auto& c : ker) {
                SparseVec s;
                for (const auto& [i, x] : c) s = sv_axpy(s, x, vs[i]);
                CHECK(s.empty());
            }
        }
    }

    TEST_CASE("solve_combination") {
        std::vector<SparseVec> im = {{{0, Scalar(1)}, {1, Scalar(1)}}, {{1, Scalar(1)}}};
        auto x = solve_combination(im, {{0, Scalar(2)}});
        REQUIRE(x);
        SparseVec s;
        for (const auto& [i, c] : *x) s = sv_axpy(s, c, im[i]);
        CHECK(s == SparseVec{{0, Scalar(2)}});
        CHECK_FALSE(solve_combination(im, {{2, Scalar(1)}}));
    }

    TEST_CASE("reduction picks the largest indices as pivots") {
        RowReducer rr;
        rr.add({{0, Scalar(1)}, {3, Scalar(1)}});
        CHECK(rr.is_pivot(3));
        CHECK(rr.reduce({{3, Scalar(1)}}) == SparseVec{{0, Scalar(-1)}});
    }

    TEST_CASE("matrix algebra") {
        Matrix a(2, 2), b(2, 2);
        a.set(0, 0, Scalar(1));
        a.set(0, 1, Scalar(2));
        a.set(1, 1, Scalar::q());
        b.set(1, 0, Scalar(1));
        b.set(0, 1, Scalar(1));
        CHECK((a * b).at(0, 0) == Scalar(2));
        CHECK((a * b).at(1, 0) == Scalar::q());
        auto inv = a.inverse();
        REQUIRE(inv);
        CHECK(a * *inv == Matrix::identity(2));
        Matrix k = kron(a, b);
        CHECK(k.rows == 4);
        CHECK(k.at(1, 0) == Scalar(1));
        CHECK(k.at(3, 3) == Scalar(0));
        CHECK(k.at(2, 3) == Scalar::q());
        CHECK(kron(a, b) * kron(b, a) == kron(a * b, b * a));
        CHECK(a.transpose().transpose() == a);
    }

    TEST_CASE("span intersection") {
        std::vector<SparseVec> a = {sv_unit(0), sv_unit(1)};
        std::vector<SparseVec> b = {sv_axpy(sv_unit(1), Scalar(1), sv_unit(2)), sv_unit(0)};
        auto i = intersect_spans(a, b);
        CHECK(i.size() == 1);
        CHECK(same_span(i, {sv_unit(0)}));
    }
}
