#include "quantact/gauss.hpp"

#include <cmath>
#include <stdexcept>

namespace quantact {

Gauss Gauss::from_double(double v) {
    if (!std::isfinite(v)) {
        throw std::domain_error("cannot convert non-finite double to an exact rational");
    }
    Rational q(v);
    q.canonicalize();
    return Gauss(q);
}

Gauss Gauss::inverse() const {
    if (is_zero()) {
        throw std::domain_error("division by exact zero");
    }
    Rational n = re_ * re_ + im_ * im_;
    return Gauss(Rational(re_ / n), Rational(-im_ / n));
}

Gauss& Gauss::operator*=(const Gauss& o) {
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
        re_ *= o.re_;
        return *this;
    }
    Rational re = re_ * o.re_ - im_ * o.im_;
    Rational im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
}

int Gauss::compare(const Gauss& o) const {
    int c = cmp(re_, o.re_);
    if (c != 0) {
        return c < 0 ? -1 : 1;
    }
    c = cmp(im_, o.im_);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

std::string Gauss::str() const {
    if (sgn(im_) == 0) {
        return re_.get_str();
    }
    std::string im_part;
    if (im_ == 1) {
        im_part = "i";
    } else if (im_ == -1) {
        im_part = "-i";
    } else {
        im_part = im_.get_str() + "*i";
    }
    if (sgn(re_) == 0) {
        return im_part;
    }
    std::string out = "(" + re_.get_str();
    if (sgn(im_) > 0) {
        out += "+";
    }
    return out + im_part + ")";
}

Rational factorial(unsigned n) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return Rational(f);
}

}  // namespace quantact
