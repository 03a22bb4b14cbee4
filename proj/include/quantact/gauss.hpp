#pragma once

#include <complex>
#include <cstdint>
#include <gmpxx.h>
#include <string>

namespace quantact {

using Rational = mpq_class;

/// Exact Gaussian rational a + b*i with a, b in Q.
class Gauss {
public:
    Gauss() = default;
    Gauss(long re) : re_(re) {}  // NOLINT(google-explicit-constructor)
    Gauss(Rational re) : re_(std::move(re)) {}  // NOLINT(google-explicit-constructor)
    Gauss(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

    static Gauss i() { return Gauss(Rational(0), Rational(1)); }
    static Gauss fraction(long num, long den) {
        Rational q(num, den);
        q.canonicalize();
        return Gauss(q);
    }
    /// Exact binary value of a double.
    static Gauss from_double(double v);

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }

    Gauss conj() const { return Gauss(re_, -im_); }
    Gauss inverse() const;
    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

    Gauss& operator+=(const Gauss& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    Gauss& operator-=(const Gauss& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    Gauss& operator*=(const Gauss& o);
    Gauss& operator/=(const Gauss& o) { return *this *= o.inverse(); }

    friend Gauss operator+(Gauss a, const Gauss& b) { return a += b; }
    friend Gauss operator-(Gauss a, const Gauss& b) { return a -= b; }
    friend Gauss operator*(Gauss a, const Gauss& b) { return a *= b; }
    friend Gauss operator/(Gauss a, const Gauss& b) { return a /= b; }
    friend Gauss operator-(const Gauss& a) { return Gauss(-a.re_, -a.im_); }

    friend bool operator==(const Gauss& a, const Gauss& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
    friend bool operator!=(const Gauss& a, const Gauss& b) { return !(a == b); }
    /// Total order (real part first); only used for canonical sorting.
    int compare(const Gauss& o) const;

    /// Grammar-compatible text, e.g. "3", "-1/2", "i", "(1/2-3*i)".
    std::string str() const;

private:
    Rational re_{0};
    Rational im_{0};
};

Rational factorial(unsigned n);

}  // namespace quantact
