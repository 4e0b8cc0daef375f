#include "qpb/scalar.hpp"

#include <ostream>
#include <sstream>

namespace qpb {

Poly::Poly(const Rational& c) {
    if (c != 0) {
        c_.push_back(c);
        c_.back().canonicalize();
    }
}

Poly::Poly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) {
    for (auto& x : c_) x.canonicalize();
    trim();
}

Poly Poly::monomial(const Rational& c, int power) {
    Poly p;
    if (c == 0) return p;
    p.c_.assign(power + 1, Rational(0));
    p.c_[power] = c;
    p.c_[power].canonicalize();
    return p;
}

void Poly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational Poly::coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(c_.size())) return Rational(0);
    return c_[i];
}

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

Poly& Poly::operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational(0));
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational(0));
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
}

Poly& Poly::operator*=(const Rational& s) {
    if (s == 0) {
        c_.clear();
        return *this;
    }
    for (auto& x : c_) x *= s;
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    if (a.is_zero() || b.is_zero()) return r;
    r.c_.assign(a.c_.size() + b.c_.size() - 1, Rational(0));
    for (size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i] == 0) continue;
        for (size_t j = 0; j < b.c_.size(); ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
    }
    r.trim();
    return r;
}

void Poly::divmod(const Poly& a, const Poly& b, Poly& quot, Poly& rem) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    quot = Poly();
    rem = a;
    if (rem.degree() < b.degree()) return;
    quot.c_.assign(rem.degree() - b.degree() + 1, Rational(0));
    const Rational inv_lead = 1 / b.lead();
    while (!rem.is_zero() && rem.degree() >= b.degree()) {
        int shift = rem.degree() - b.degree();
        Rational f = rem.lead() * inv_lead;
        quot.c_[shift] = f;
        for (size_t j = 0; j < b.c_.size(); ++j) rem.c_[shift + j] -= f * b.c_[j];
        rem.trim();
    }
    quot.trim();
}

Poly Poly::monic() const {
    if (is_zero()) return *this;
    Poly r = *this;
    r *= 1 / lead();
    return r;
}

Poly Poly::gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
        Poly qt, r;
        divmod(a, b, qt, r);
        a = std::move(b);
        b = r.monic();
    }
    return a.monic();
}

Rational Poly::eval(const Rational& x) const {
    Rational acc(0);
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
}

std::string Poly::str() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t i = c_.size(); i-- > 0;) {
        const Rational& c = c_[i];
        if (c == 0) continue;
        Rational mag = abs(c);
        if (first) {
            if (c < 0) os << "-";
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        if (i == 0 || mag != 1) {
            os << mag;
            if (i > 0) os << "*";
        }
        if (i == 1) os << "q";
        if (i > 1) os << "q^" << i;
    }
    return os.str();
}

Scalar::Scalar(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw std::domain_error("scalar with zero denominator");
    canonicalize();
}

void Scalar::canonicalize() {
    if (num_.is_zero()) {
        den_ = Poly(Rational(1));
        return;
    }
    if (den_.is_constant()) {
        if (!den_.is_one()) {
            num_ *= 1 / den_.lead();
            den_ = Poly(Rational(1));
        }
        return;
    }
    Poly g = Poly::gcd(num_, den_);
    if (!g.is_one()) {
        Poly qt, r;
        Poly::divmod(num_, g, qt, r);
        num_ = qt;
        Poly::divmod(den_, g, qt, r);
        den_ = qt;
    }
    Rational lc = den_.lead();
    if (lc != 1) {
        num_ *= 1 / lc;
        den_ *= 1 / lc;
    }
}

Scalar Scalar::q() { return Scalar(Poly::monomial(Rational(1), 1)); }

Scalar Scalar::q_pow(int k) {
    if (k >= 0) return Scalar(Poly::monomial(Rational(1), k));
    return Scalar(Poly(Rational(1)), Poly::monomial(Rational(1), -k));
}

Rational Scalar::as_rational() const {
    if (!is_rational()) throw std::domain_error("scalar depends on q: " + str());
    return num_.coeff(0);
}

Scalar Scalar::operator-() const {
    Scalar r = *this;
    r.num_ = -r.num_;
    return r;
}

Scalar& Scalar::operator+=(const Scalar& o) {
    if (den_.is_one() && o.den_.is_one()) {
        num_ += o.num_;
        return *this;
    }
    if (den_ == o.den_) {
        num_ += o.num_;
        canonicalize();
        return *this;
    }
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ = den_ * o.den_;
    canonicalize();
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) { return *this += -o; }

Scalar& Scalar::operator*=(const Scalar& o) {
    if (o.num_.is_zero() || num_.is_zero()) {
        num_ = Poly();
        den_ = Poly(Rational(1));
        return *this;
    }
    if (o.is_rational()) {
        num_ *= o.num_.lead();
        return *this;
    }
    if (is_rational()) {
        Rational c = num_.lead();
        *this = o;
        num_ *= c;
        return *this;
    }
    num_ = num_ * o.num_;
    den_ = den_ * o.den_;
    if (!den_.is_one()) canonicalize();
    return *this;
}

Scalar Scalar::inverse() const {
    if (is_zero()) throw std::domain_error("inverse of zero scalar");
    return Scalar(den_, num_);
}

Scalar& Scalar::operator/=(const Scalar& o) { return *this *= o.inverse(); }

Scalar Scalar::specialize(const Rational& q_value) const {
    Rational d = den_.eval(q_value);
    if (d == 0) throw PoleError("pole at q = " + q_value.get_str() + " in " + str());
    return Scalar(Rational(num_.eval(q_value) / d));
}

std::string Scalar::str() const {
    if (den_.is_one()) return num_.str();
    return "(" + num_.str() + ")/(" + den_.str() + ")";
}

std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

}  // namespace qpb
