#include "iet/angle_group.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace iet {

namespace {

// floor of an exact rational
mpz_class mpq_floor(const mpq_class& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return f;
}

constexpr long kHardCapBits = 1 << 15;
constexpr double kErrRefreshCap = 1e-9;

/* Certified representative-in-[0,1) of  sigma_base + p/m + sum k_i theta_i
   (base = -1 means no sigma term).  Escalates precision internally until
   the mod-1 floor is decided; throws undecidable_error if the backends
   cannot ever decide it (possible only when a declared-irrational value is
   in fact an integer, i.e. the declarations are wrong, or a decimal string
   is too short). */
MpqInterval rep_enclosure(const AngleGroup* g, int base, long long p, const coord_vec& k,
                          long bits) {
    // extra bits so the k-weighted sum still meets the width target
    double absk = 1.0;
    for (long long c : k) absk += std::fabs(static_cast<double>(c));
    long pad = static_cast<long>(std::ceil(std::log2(absk + 2.0))) + 2;

    mpq_class prev_width(-1);
    for (long b = bits;; b = b * 2) {
        if (b > kHardCapBits)
            throw undecidable_error("enclosure precision cap exhausted while reducing mod 1");
        mpq_class lo(static_cast<long>(p), g->m()), hi(lo);
        lo.canonicalize();
        hi.canonicalize();
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (k[i] == 0) continue;
            MpqInterval ti = g->theta(static_cast<int>(i)).at(b + pad);
            long c = static_cast<long>(k[i]);
            if (c > 0) {
                lo += c * ti.lo;
                hi += c * ti.hi;
            } else {
                lo += c * ti.hi;
                hi += c * ti.lo;
            }
        }
        if (base >= 0) {
            MpqInterval si = g->sigma(base).at(b + pad);
            lo += si.lo;
            hi += si.hi;
        }
        mpz_class flo = mpq_floor(lo), fhi = mpq_floor(hi);
        if (flo == fhi) return {lo - flo, hi - flo};
        mpq_class w = hi - lo;
        if (w == 0) {
            // exact value sitting on an integer: representative is exactly 0
            return {mpq_class(0), mpq_class(0)};
        }
        if (w == prev_width)
            throw undecidable_error("enclosure width floor reached while reducing mod 1 "
                                    "(decimal generators too short?)");
        prev_width = w;
    }
}

double interval_err_bound(const MpqInterval& iv, double mid) {
    return iv.width().get_d() * 0.5 * (1.0 + 1e-9) + (std::fabs(mid) + 1.0) * 0x1p-52 + 0x1p-60;
}

void set_approx_from(const MpqInterval& iv, double& approx, double& err) {
    mpq_class mid = iv.mid();
    approx = mid.get_d();
    err = interval_err_bound(iv, approx);
}

void check_group(const AngleGroup* a, const AngleGroup* b) {
    if (a != b) throw config_error("mixed AngleGroup operands");
}

long long add_checked(long long a, long long b) {
    long long r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("angle coordinate overflow");
    return r;
}

} // namespace

AngleGroup::AngleGroup(long m, std::vector<RealEnclosure> theta, std::vector<RealEnclosure> sigma)
    : m_(m), theta_(std::move(theta)), sigma_(std::move(sigma)) {
    if (m_ < 1) throw config_error("torsion order m must be >= 1");
    if (sigma_.empty()) throw config_error("at least one base point required");
    sigma_rep_.resize(sigma_.size());
    sigma_err_.resize(sigma_.size());
    for (int b = 0; b < base_count(); ++b) {
        MpqInterval iv = rep_enclosure(this, b, 0, {}, 64);
        set_approx_from(iv, sigma_rep_[b], sigma_err_[b]);
    }
    /* Base points are DECLARED to lie in distinct Lambda-cosets; all we can
       actually check is that their values separate within the precision
       ladder.  Failure here is a configuration problem, not a runtime one. */
    for (int a = 0; a < base_count(); ++a)
        for (int b = a + 1; b < base_count(); ++b) {
            Point pa = point_make(*this, a), pb = point_make(*this, b);
            try {
                if (point_compare(pa, pb) == 0)
                    throw config_error("base points " + std::to_string(a) + " and " +
                                       std::to_string(b) + " coincide");
            } catch (const undecidable_error&) {
                throw config_error("base points " + std::to_string(a) + " and " +
                                   std::to_string(b) +
                                   " cannot be separated within the precision ladder");
            }
        }
}

Angle angle_zero(const AngleGroup& g) {
    Angle a;
    a.group = &g;
    a.k.assign(g.d(), 0);
    return a;
}

Angle angle_make(const AngleGroup& g, long long p, coord_vec k) {
    if (static_cast<int>(k.size()) != g.d())
        throw config_error("angle coordinate count does not match the group rank");
    Angle a;
    a.group = &g;
    a.p = ((p % g.m()) + g.m()) % g.m();
    a.k = std::move(k);
    return a;
}

Angle angle_add(const Angle& a, const Angle& b) {
    check_group(a.group, b.group);
    Angle r;
    r.group = a.group;
    r.p = (a.p + b.p) % a.group->m();
    r.k.resize(a.k.size());
    for (std::size_t i = 0; i < a.k.size(); ++i) r.k[i] = add_checked(a.k[i], b.k[i]);
    return r;
}

Angle angle_neg(const Angle& a) {
    Angle r;
    r.group = a.group;
    r.p = a.p == 0 ? 0 : a.group->m() - a.p;
    r.k.resize(a.k.size());
    for (std::size_t i = 0; i < a.k.size(); ++i) {
        if (a.k[i] == std::numeric_limits<long long>::min())
            throw std::overflow_error("angle coordinate overflow");
        r.k[i] = -a.k[i];
    }
    return r;
}

bool angle_equal(const Angle& a, const Angle& b) {
    return a.group == b.group && a.p == b.p && a.k == b.k;
}

bool angle_is_zero(const Angle& a) {
    if (a.p != 0) return false;
    for (long long c : a.k)
        if (c != 0) return false;
    return true;
}

std::uint64_t angle_hash(const Angle& a) {
    std::uint64_t h = mix64(static_cast<std::uint64_t>(a.p));
    for (long long c : a.k) h = hash_combine(h, static_cast<std::uint64_t>(c));
    return h;
}

MpqInterval angle_real_enclosure(const Angle& a, long bits) {
    return rep_enclosure(a.group, -1, a.p, a.k, bits);
}

ApproxRep angle_rep_approx(const Angle& a) {
    const AngleGroup* g = a.group;
    double raw = static_cast<double>(a.p) / static_cast<double>(g->m());
    double err = 0x1p-52;
    bool flat = true;
    for (std::size_t i = 0; i < a.k.size(); ++i) {
        if (a.k[i] == 0) continue;
        flat = false;
        double c = static_cast<double>(a.k[i]);
        raw += c * g->theta_approx(static_cast<int>(i));
        err += std::fabs(c) * g->theta_err(static_cast<int>(i)) + 0x1p-50 * (1.0 + std::fabs(raw));
    }
    if (flat) {
        // pure torsion: exact in double for any sane m
        return {raw, 0x1p-52};
    }
    double fl = std::floor(raw);
    double rep = raw - fl;
    double dist = std::min(rep, 1.0 - rep);
    if (dist > err && err < kErrRefreshCap) return {rep, err};
    MpqInterval iv = angle_real_enclosure(a, 128);
    double ap, ae;
    set_approx_from(iv, ap, ae);
    return {ap, ae};
}

std::string angle_str(const Angle& a) {
    std::ostringstream os;
    os << a.p << "/" << a.group->m() << " + [";
    for (std::size_t i = 0; i < a.k.size(); ++i) {
        if (i) os << ",";
        os << a.k[i];
    }
    os << "]·θ";
    return os.str();
}

namespace {

struct Scanner {
    std::string_view s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool eat(std::string_view tok) {
        skip_ws();
        if (s.substr(pos, tok.size()) == tok) {
            pos += tok.size();
            return true;
        }
        return false;
    }
    void expect(std::string_view tok, std::string_view what) {
        if (!eat(tok))
            throw config_error("expected '" + std::string(what) + "' in '" + std::string(s) + "'");
    }
    long long integer() {
        skip_ws();
        std::size_t start = pos;
        if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start || (pos == start + 1 && !std::isdigit(static_cast<unsigned char>(s[start]))))
            throw config_error("expected integer in '" + std::string(s) + "'");
        return std::strtoll(std::string(s.substr(start, pos - start)).c_str(), nullptr, 10);
    }
    bool done() {
        skip_ws();
        return pos == s.size();
    }
};

Angle parse_angle_body(const AngleGroup& g, Scanner& sc) {
    long long p = sc.integer();
    sc.expect("/", "/");
    long long m = sc.integer();
    if (m != g.m()) throw config_error("angle torsion denominator does not match the group");
    sc.expect("+", "+");
    sc.expect("[", "[");
    coord_vec k;
    sc.skip_ws();
    if (!sc.eat("]")) {
        for (;;) {
            k.push_back(sc.integer());
            if (sc.eat("]")) break;
            sc.expect(",", ",");
        }
    }
    sc.expect("·θ", "·θ");
    return angle_make(g, p, std::move(k));
}

} // namespace

Angle angle_parse(const AngleGroup& g, std::string_view text) {
    Scanner sc{text};
    Angle a = parse_angle_body(g, sc);
    if (!sc.done()) throw config_error("trailing characters in angle '" + std::string(text) + "'");
    return a;
}

Point point_make(const AngleGroup& g, int base) {
    return point_make(g, base, angle_zero(g));
}

Point point_make(const AngleGroup& g, int base, const Angle& off) {
    if (base < 0 || base >= g.base_count()) throw config_error("base index out of range");
    check_group(&g, off.group);
    Point x;
    x.group = &g;
    x.base = base;
    x.p = off.p;
    x.k = off.k;
    MpqInterval iv = rep_enclosure(&g, base, x.p, x.k, 64);
    set_approx_from(iv, x.approx, x.err);
    return x;
}

static void point_refresh(Point& x) {
    MpqInterval iv = rep_enclosure(x.group, x.base, x.p, x.k, 128);
    set_approx_from(iv, x.approx, x.err);
}

Point point_translate(const Point& x, const Angle& a) {
    ApproxRep r = angle_rep_approx(a);
    return point_translate(x, a, r.rep, r.err);
}

Point point_translate(const Point& x, const Angle& a, double rep, double rep_err) {
    check_group(x.group, a.group);
    Point y;
    y.group = x.group;
    y.base = x.base;
    y.p = (x.p + a.p) % x.group->m();
    y.k.resize(x.k.size());
    for (std::size_t i = 0; i < x.k.size(); ++i) y.k[i] = add_checked(x.k[i], a.k[i]);
    double raw = x.approx + rep; // in [0, 2)
    double err = x.err + rep_err + 0x1p-51;
    double folded = raw >= 1.0 ? raw - 1.0 : raw;
    // the fold is certified only when the raw value is safely away from integers
    double dist = std::min({std::fabs(raw), std::fabs(raw - 1.0), std::fabs(raw - 2.0)});
    y.approx = folded;
    y.err = err;
    if (dist <= err || err > kErrRefreshCap) point_refresh(y);
    return y;
}

bool point_equal(const Point& x, const Point& y) {
    return x.group == y.group && x.base == y.base && x.p == y.p && x.k == y.k;
}

std::uint64_t point_hash(const Point& x) {
    std::uint64_t h = mix64(static_cast<std::uint64_t>(x.base) * 0x9e3779b97f4a7c15ull ^
                            static_cast<std::uint64_t>(x.p));
    for (long long c : x.k) h = hash_combine(h, static_cast<std::uint64_t>(c));
    return h;
}

int point_compare(const Point& x, const Point& y) {
    check_group(x.group, y.group);
    if (point_equal(x, y)) return 0;
    double d = x.approx - y.approx;
    double slack = x.err + y.err;
    if (d > slack) return 1;
    if (d < -slack) return -1;
    for (long bits : kPrecisionLadder) {
        MpqInterval ix = point_value_enclosure(x, bits);
        MpqInterval iy = point_value_enclosure(y, bits);
        if (ix.hi < iy.lo) return -1;
        if (iy.hi < ix.lo) return 1;
        if (ix.width() == 0 && iy.width() == 0) {
            // overlapping zero-width intervals = equal values with distinct
            // coordinates: the distinct-coset declaration is violated
            throw undecidable_error("points " + point_str(x) + " and " + point_str(y) +
                                    " have equal values but distinct coordinates");
        }
    }
    throw undecidable_error("cannot order " + point_str(x) + " and " + point_str(y) +
                            " within the precision ladder");
}

MpqInterval point_value_enclosure(const Point& x, long bits) {
    return rep_enclosure(x.group, x.base, x.p, x.k, bits);
}

std::string point_str(const Point& x) {
    Angle a;
    a.group = x.group;
    a.p = x.p;
    a.k = x.k;
    return "x" + std::to_string(x.base) + " + " + angle_str(a);
}

Point point_parse(const AngleGroup& g, std::string_view text) {
    Scanner sc{text};
    sc.expect("x", "x");
    long long base = sc.integer();
    sc.expect("+", "+");
    Angle a = parse_angle_body(g, sc);
    if (!sc.done()) throw config_error("trailing characters in point '" + std::string(text) + "'");
    return point_make(g, static_cast<int>(base), a);
}

Angle point_offset(const Point& x) {
    Angle a;
    a.group = x.group;
    a.p = x.p;
    a.k = x.k;
    return a;
}

} // namespace iet
