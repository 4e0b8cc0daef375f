#include <random>

#include "doctest.h"
#include "qpb/scalar.hpp"

using namespace qpb;

namespace {

Poly random_poly(std::mt19937_64& rng, int max_deg) {
    std::uniform_int_distribution<int> deg(0, max_deg), coef(-4, 4), den(1, 3);
    std::vector<Rational> c(deg(rng) + 1);
    for (auto& x : c) x = Rational(coef(rng), den(rng));
    return Poly(c);
}

Scalar random_scalar(std::mt19937_64& rng) {
    Poly d;
    while (d.is_zero()) d = random_poly(rng, 2);
    return Scalar(random_poly(rng, 3), d);
}

}  // namespace

TEST_SUITE("scalar") {
    TEST_CASE("specialization examples") {
        const Scalar q = Scalar::q();
        CHECK(q.specialize(1) == Scalar(1));
        Scalar f = (q * q - Scalar(1)) / (q - Scalar(1));
        CHECK(f == q + Scalar(1));
        CHECK(f.specialize(1) == Scalar(2));
        Scalar pole = Scalar(1) / (q - Scalar(1));
        CHECK_THROWS_AS(pole.specialize(1), PoleError);
        CHECK(pole.specialize(3) == Scalar(Rational(1, 2)));
    }

    TEST_CASE("canonical form") {
        const Scalar q = Scalar::q();
        Scalar a = (Scalar(2) * q + Scalar(2)) / (Scalar(4) * q * q - Scalar(4));
        CHECK(a == Scalar(Rational(1, 2)) / (q - Scalar(1)));
        CHECK(a.den().lead() == 1);
        CHECK(Scalar::q_pow(-2) * Scalar::q_pow(3) == q);
        CHECK((q - q).is_zero());
        CHECK((q - q).den().is_one());
    }

    TEST_CASE("field axioms on random elements") {
        std::mt19937_64 rng(7);
        for (int it = 0; it < 150; ++it) {
            Scalar a = random_scalar(rng), b = random_scalar(rng), c = random_scalar(rng);
            CHECK((a + b) + c == a + (b + c));
            CHECK((a * b) * c == a * (b * c));
            CHECK(a * (b + c) == a * b + a * c);
            CHECK(a + b == b + a);
            CHECK(a * b == b * a);
            CHECK(a - a == Scalar(0));
            if (!a.is_zero()) CHECK(a * a.inverse() == Scalar(1));
        }
    }

    TEST_CASE("specialization is a ring homomorphism") {
        std::mt19937_64 rng(11);
        const Rational x(3, 2);
        int tested = 0;
        for (int it = 0; it < 100; ++it) {
            Scalar a = random_scalar(rng), b = random_scalar(rng);
            try {
                Scalar sa = a.specialize(x), sb = b.specialize(x);
                CHECK((a * b).specialize(x) == sa * sb);
                CHECK((a + b).specialize(x) == sa + sb);
                ++tested;
            } catch (const PoleError&) {
            }
        }
        CHECK(tested > 50);
    }

    TEST_CASE("polynomial gcd") {
        const Scalar q = Scalar::q();
        Poly a = ((q - Scalar(1)) * (q + Scalar(2))).num();
        Poly b = ((q - Scalar(1)) * (q - Scalar(3))).num();
        CHECK(Poly::gcd(a, b) == (q - Scalar(1)).num());
    }
}
