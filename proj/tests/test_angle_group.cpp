#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "iet/angle_group.hpp"
#include "iet/errors.hpp"

#include <gmpxx.h>
#include <vector>

using namespace iet;

namespace {

AngleGroup make_standard() {
    std::vector<RealEnclosure> theta = {RealEnclosure::sqrt_affine(2, 1, -1),
                                        RealEnclosure::sqrt_affine(3, 1, -1)};
    std::vector<RealEnclosure> sigma = {RealEnclosure::exact(0),
                                        RealEnclosure::sqrt_affine(5, 1, -2)};
    return AngleGroup(12, std::move(theta), std::move(sigma));
}

} // namespace

TEST_CASE("angle arithmetic is exact integer arithmetic") {
    AngleGroup g = make_standard();
    CHECK(g.m() == 12);
    CHECK(g.d() == 2);
    CHECK(g.base_count() == 2);

    Angle a = angle_make(g, 1, {2, -1});
    Angle b = angle_make(g, 11, {0, 5});
    Angle s = angle_add(a, b);
    CHECK(s.p == 0);
    CHECK(s.k[0] == 2);
    CHECK(s.k[1] == 4);

    Angle n = angle_neg(a);
    CHECK(n.p == 11);
    CHECK(n.k[0] == -2);
    CHECK(n.k[1] == 1);
    CHECK(angle_is_zero(angle_add(a, n)));

    CHECK(angle_equal(a, angle_make(g, 13, {2, -1}))); // p normalized mod m
    CHECK(!angle_equal(a, b));
    CHECK(angle_hash(a) == angle_hash(angle_make(g, 1, {2, -1})));

    CHECK_THROWS_AS(angle_make(g, 0, {1}), config_error); // wrong rank
}

TEST_CASE("angle and point rendering round-trips") {
    AngleGroup g = make_standard();
    Angle a = angle_make(g, 5, {3, -1});
    std::string s = angle_str(a);
    CHECK(s == "5/12 + [3,-1]·θ");
    CHECK(angle_equal(angle_parse(g, s), a));
    CHECK(angle_equal(angle_parse(g, " 5/12 + [ 3 , -1 ]·θ "), a));
    CHECK_THROWS_AS(angle_parse(g, "5/7 + [3,-1]·θ"), config_error);
    CHECK_THROWS_AS(angle_parse(g, "5/12 + [3]·θ"), config_error);
    CHECK_THROWS_AS(angle_parse(g, "5/12 + [3,-1]·θ junk"), config_error);

    Point x = point_make(g, 1, a);
    std::string ps = point_str(x);
    CHECK(ps == "x1 + 5/12 + [3,-1]·θ");
    CHECK(point_equal(point_parse(g, ps), x));
}

/* oracle: rep of 1/4' style angles against the defining polynomial of the
   square roots, using exact rational interval endpoints */
TEST_CASE("angle representative enclosures bracket the true value") {
    AngleGroup g = make_standard();

    // 3/12 + (sqrt2 - 1) = sqrt2 - 3/4, in (0,1)
    Angle a = angle_make(g, 3, {1, 0});
    MpqInterval iv = angle_real_enclosure(a, 128);
    CHECK(iv.lo > 0);
    CHECK(iv.hi < 1);
    mpq_class lo_s = iv.lo + mpq_class(3, 4), hi_s = iv.hi + mpq_class(3, 4);
    CHECK(lo_s * lo_s <= 2);
    CHECK(hi_s * hi_s >= 2);

    // 9/12 + (sqrt2 - 1) = sqrt2 - 1/4 > 1 folds to sqrt2 - 5/4
    Angle b = angle_make(g, 9, {1, 0});
    MpqInterval ivb = angle_real_enclosure(b, 128);
    mpq_class lo_b = ivb.lo + mpq_class(5, 4), hi_b = ivb.hi + mpq_class(5, 4);
    CHECK(lo_b * lo_b <= 2);
    CHECK(hi_b * hi_b >= 2);

    // -(sqrt2 - 1) folds to 2 - sqrt2
    Angle c = angle_make(g, 0, {-1, 0});
    MpqInterval ivc = angle_real_enclosure(c, 128);
    mpq_class lo_c = 2 - ivc.hi, hi_c = 2 - ivc.lo;
    CHECK(lo_c * lo_c <= 2);
    CHECK(hi_c * hi_c >= 2);

    // approximate representative agrees with the certified one
    ApproxRep r = angle_rep_approx(b);
    CHECK(std::fabs(r.rep - ivb.mid().get_d()) <= r.err + ivb.width().get_d());
}

TEST_CASE("point translation folds exactly and keeps coordinates exact") {
    AngleGroup g = make_standard();
    Point x = point_make(g, 0);
    Angle step = angle_make(g, 9, {1, 0});

    x = point_translate(x, step);
    x = point_translate(x, step);
    CHECK(x.p == 6);
    CHECK(x.k[0] == 2);
    CHECK(x.k[1] == 0);

    // value is 2*sqrt2 + 3/2 mod 1 = 2*sqrt2 - 3/2 + ... : (v + 5/2)^2 == 8
    MpqInterval iv = point_value_enclosure(x, 128);
    CHECK(iv.lo > 0);
    CHECK(iv.hi < 1);
    mpq_class lo_s = iv.lo + mpq_class(5, 2), hi_s = iv.hi + mpq_class(5, 2);
    CHECK(lo_s * lo_s <= 8);
    CHECK(hi_s * hi_s >= 8);
}

TEST_CASE("long pseudo-random translation runs stay consistent") {
    AngleGroup g = make_standard();
    Point x = point_make(g, 0);
    Angle total = angle_zero(g);
    Angle steps[3] = {angle_make(g, 1, {1, 0}), angle_make(g, 7, {0, 1}),
                      angle_make(g, 5, {-1, 2})};
    for (int i = 0; i < 2000; ++i) {
        const Angle& s = steps[mix64(static_cast<std::uint64_t>(i)) % 3];
        x = point_translate(x, s);
        total = angle_add(total, s);
        if (i % 500 == 499) {
            MpqInterval iv = point_value_enclosure(x, 256);
            double mid = iv.mid().get_d();
            CHECK(std::fabs(x.approx - mid) <= x.err + iv.width().get_d() + 1e-15);
            CHECK(x.err < 1e-6);
        }
    }
    Point direct = point_make(g, 0, total);
    CHECK(point_equal(x, direct));
    CHECK(point_compare(x, direct) == 0);
    CHECK(point_hash(x) == point_hash(direct));
}

TEST_CASE("comparison escalates precision to separate near-coincident points") {
    /* m is the denominator of a deep continued-fraction convergent of
       sqrt2, so p/m sits within ~1e-24 of sqrt2-1: far below double
       resolution, decidable only by interval refinement.  The expected
       sign is derived in-test from exact integer arithmetic. */
    mpz_class P("886731088897"), Q("627013566048");
    bool convergent_above = P * P > 2 * Q * Q;

    std::vector<RealEnclosure> theta = {RealEnclosure::sqrt_affine(2, 1, -1)};
    std::vector<RealEnclosure> sigma = {RealEnclosure::exact(0)};
    AngleGroup g(627013566048L, std::move(theta), std::move(sigma));

    Point xt = point_make(g, 0, angle_make(g, 0, {1}));
    Point xr = point_make(g, 0, angle_make(g, 259717522849LL, {0}));
    CHECK(point_compare(xt, xr) == (convergent_above ? -1 : 1));
    CHECK(point_compare(xr, xt) == (convergent_above ? 1 : -1));
}

TEST_CASE("comparison fails loudly when a decimal generator is too short") {
    std::vector<RealEnclosure> theta = {RealEnclosure::decimal("0.4142135623")};
    std::vector<RealEnclosure> sigma = {RealEnclosure::exact(0)};
    AngleGroup g(10000000000L, std::move(theta), std::move(sigma));

    Point xt = point_make(g, 0, angle_make(g, 0, {1}));
    Point xr = point_make(g, 0, angle_make(g, 4142135623LL, {0}));
    CHECK_THROWS_AS(point_compare(xt, xr), undecidable_error);
}

TEST_CASE("violated independence declarations are detected, not absorbed") {
    /* theta declared independent but actually 1/3: two coordinate-distinct
       names for the same value have zero-width enclosures, which the
       comparison reports instead of inventing an order */
    std::vector<RealEnclosure> theta = {RealEnclosure::exact(mpq_class(1, 3))};
    std::vector<RealEnclosure> sigma = {RealEnclosure::exact(0)};
    AngleGroup g(3, std::move(theta), std::move(sigma));

    Point xt = point_make(g, 0, angle_make(g, 0, {1}));
    Point xr = point_make(g, 0, angle_make(g, 1, {0}));
    CHECK_THROWS_AS(point_compare(xt, xr), undecidable_error);
}

TEST_CASE("coinciding base points are rejected at construction") {
    std::vector<RealEnclosure> theta;
    std::vector<RealEnclosure> sigma = {RealEnclosure::exact(mpq_class(1, 4)),
                                        RealEnclosure::exact(mpq_class(1, 4))};
    CHECK_THROWS_AS(AngleGroup(2, std::move(theta), std::move(sigma)), config_error);
}

TEST_CASE("basic argument validation") {
    AngleGroup g = make_standard();
    CHECK_THROWS_AS(point_make(g, 7), config_error);
    CHECK_THROWS_AS(point_make(g, -1), config_error);
    CHECK_THROWS_AS(AngleGroup(0, {}, {RealEnclosure::exact(0)}), config_error);
    CHECK_THROWS_AS(AngleGroup(2, {}, {}), config_error);
}
