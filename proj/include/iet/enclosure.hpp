#pragma once
#include "iet/rational.hpp"

#include <string>
#include <string_view>

namespace iet {

struct MpqInterval {
    mpq_class lo, hi;

    mpq_class width() const { return hi - lo; }
    mpq_class mid() const { return (lo + hi) / 2; }
    bool contains(const mpq_class& v) const { return lo <= v && v <= hi; }
};

/* A certified real: an enclosure procedure, pure in (definition, precision).
   at(bits) returns an interval guaranteed to contain the value, of width at
   most 2^-bits whenever the backend can deliver it.  Backends:

     exact    - a rational; width 0 at any precision.
     decimal  - a digit string; digits are revealed progressively, so the
                width floors at the string's own resolution.  This is the
                form configs use for irrational angle generators.
     sqrt     - scale*sqrt(radicand)+shift over rationals, refined by integer
                square roots; refinable without bound (used by tests that
                need to push the comparison ladder arbitrarily far).

   Nesting: at(b') for b' >= b is contained in at(b). */
class RealEnclosure {
public:
    static RealEnclosure exact(mpq_class v);
    static RealEnclosure decimal(std::string_view digits);
    static RealEnclosure sqrt_affine(mpq_class radicand, mpq_class scale, mpq_class shift);

    MpqInterval at(long bits) const;

    bool is_exact() const { return kind_ == Kind::Exact; }
    const mpq_class& exact_value() const { return a_; }

    // double midpoint and a rigorous bound on |approx - value| (from at(64))
    double approx() const { return approx_; }
    double approx_err() const { return err_; }

    // canonical text used for config echo and content hashing
    std::string describe() const;

private:
    enum class Kind { Exact, Decimal, Sqrt };
    Kind kind_ = Kind::Exact;
    mpq_class a_, b_, c_; // exact: a | decimal: a=value (b=resolution) | sqrt: a=rad, b=scale, c=shift
    long frac_digits_ = 0;
    std::string text_;
    double approx_ = 0.0, err_ = 0.0;

    void seed_approx();
};

} // namespace iet
