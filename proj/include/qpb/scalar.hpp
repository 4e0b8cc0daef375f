#pragma once

// Exact scalars: rational functions in one indeterminate q over the rationals.

#include <gmpxx.h>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpb {

using Rational = mpq_class;

struct PoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense univariate polynomial over Q, coefficients stored low degree first.
class Poly {
   public:
    Poly() = default;
    Poly(const Rational& c);
    explicit Poly(std::vector<Rational> coeffs);

    static Poly monomial(const Rational& c, int power);

    bool is_zero() const { return c_.empty(); }
    bool is_constant() const { return c_.size() <= 1; }
    bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const Rational& lead() const { return c_.back(); }
    const std::vector<Rational>& coeffs() const { return c_; }
    Rational coeff(int i) const;

    Poly operator-() const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(const Rational& s);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

    /// Euclidean division; throws on division by zero.
    static void divmod(const Poly& a, const Poly& b, Poly& quot, Poly& rem);
    /// Monic gcd (zero if both are zero).
    static Poly gcd(Poly a, Poly b);

    Poly monic() const;
    Rational eval(const Rational& x) const;
    std::string str() const;

   private:
    void trim();
    std::vector<Rational> c_;
};

/// Element of Q(q) in canonical form: reduced fraction with monic denominator.
class Scalar {
   public:
    Scalar() : den_(Rational(1)) {}
    Scalar(int v) : num_(Rational(v)), den_(Rational(1)) {}
    Scalar(const Rational& v) : num_(v), den_(Rational(1)) {}
    Scalar(const Poly& p) : num_(p), den_(Rational(1)) {}
    Scalar(Poly num, Poly den);

    /// The indeterminate q.
    static Scalar q();
    /// q^k for any integer k.
    static Scalar q_pow(int k);

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return den_.is_one() && num_.is_one(); }
    bool is_polynomial() const { return den_.is_one(); }
    bool is_rational() const { return den_.is_one() && num_.is_constant(); }
    Rational as_rational() const;

    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    Scalar& operator/=(const Scalar& o);
    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
    friend bool operator==(const Scalar& a, const Scalar& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

    Scalar inverse() const;
    /// Complex conjugation; the identity here since q is a real parameter.
    Scalar conj() const { return *this; }
    /// Evaluate at a rational value of q; throws PoleError at a pole.
    Scalar specialize(const Rational& q_value) const;

    std::string str() const;

   private:
    void canonicalize();
    Poly num_;
    Poly den_;
};

std::ostream& operator<<(std::ostream& os, const Scalar& s);

}  // namespace qpb
