#include "iet/enclosure.hpp"
#include "iet/errors.hpp"

#include <cmath>

namespace iet {

RealEnclosure RealEnclosure::exact(mpq_class v) {
    RealEnclosure r;
    r.kind_ = Kind::Exact;
    r.a_ = std::move(v);
    r.text_ = rational_str(r.a_);
    r.seed_approx();
    return r;
}

RealEnclosure RealEnclosure::decimal(std::string_view digits) {
    DecimalReal d = parse_decimal(digits);
    RealEnclosure r;
    r.kind_ = Kind::Decimal;
    r.a_ = std::move(d.value);
    r.frac_digits_ = d.frac_digits;
    r.text_ = std::string(digits);
    r.seed_approx();
    return r;
}

RealEnclosure RealEnclosure::sqrt_affine(mpq_class radicand, mpq_class scale, mpq_class shift) {
    if (radicand < 0) throw config_error("sqrt of a negative rational");
    RealEnclosure r;
    r.kind_ = Kind::Sqrt;
    r.a_ = std::move(radicand);
    r.b_ = std::move(scale);
    r.c_ = std::move(shift);
    r.text_ = "sqrt(" + rational_str(r.a_) + ")*" + rational_str(r.b_) + "+" + rational_str(r.c_);
    r.seed_approx();
    return r;
}

MpqInterval RealEnclosure::at(long bits) const {
    if (bits < 1) bits = 1;
    switch (kind_) {
    case Kind::Exact:
        return {a_, a_};
    case Kind::Decimal: {
        // reveal just enough digits; the width floors at the string's resolution
        long want = static_cast<long>(bits * 0.30103) + 1; // digits ~ bits*log10(2)
        long d = want < frac_digits_ ? want : frac_digits_;
        mpz_class scale = 1;
        for (long i = 0; i < d; ++i) scale *= 10;
        mpq_class scaled = a_ * scale;
        mpz_class fl;
        mpz_fdiv_q(fl.get_mpz_t(), scaled.get_num().get_mpz_t(), scaled.get_den().get_mpz_t());
        mpq_class trunc(fl, scale);
        trunc.canonicalize();
        mpq_class ulp(1, scale);
        return {trunc - ulp, trunc + ulp};
    }
    case Kind::Sqrt: {
        long B = bits + 4;
        // sqrt(p/q) = sqrt(p*q)/q; certify with the integer floor square root
        mpz_class pq = a_.get_num() * a_.get_den();
        mpz_class scaled = pq << (2 * B);
        mpz_class t;
        mpz_sqrt(t.get_mpz_t(), scaled.get_mpz_t());
        mpz_class den = a_.get_den() << B;
        mpq_class lo(t, den), hi(t + 1, den);
        lo.canonicalize();
        hi.canonicalize();
        mpq_class l = b_ * lo + c_, h = b_ * hi + c_;
        if (l > h) std::swap(l, h); // negative scale flips the interval
        return {l, h};
    }
    }
    throw std::logic_error("unreachable enclosure kind");
}

std::string RealEnclosure::describe() const { return text_; }

void RealEnclosure::seed_approx() {
    MpqInterval iv = at(64);
    mpq_class mid = iv.mid();
    approx_ = mid.get_d();
    double w = iv.width().get_d();
    // get_d truncates toward zero with < 1 ulp error; pad generously
    err_ = w * 0.5 * (1.0 + 1e-9) + (std::fabs(approx_) + 1.0) * 0x1p-52 + 0x1p-60;
}

} // namespace iet
