#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "iet/iet.hpp"
#include "iet/errors.hpp"

#include <vector>

using namespace iet;

namespace {

AngleGroup pure_torsion(long m) {
    std::vector<RealEnclosure> sigma = {RealEnclosure::exact(0)};
    return AngleGroup(m, {}, std::move(sigma));
}

AngleGroup mixed_group() {
    std::vector<RealEnclosure> theta = {RealEnclosure::sqrt_affine(2, 1, -1),
                                        RealEnclosure::sqrt_affine(3, 1, -1)};
    std::vector<RealEnclosure> sigma = {RealEnclosure::exact(0),
                                        RealEnclosure::sqrt_affine(5, 1, -2)};
    return AngleGroup(12, std::move(theta), std::move(sigma));
}

/* the two-arc exchange of [0,1/2) and [1/2,1) restricted further: arcs
   [0,1/4) -> +1/4, [1/4,1/2) -> -1/4, [1/2,1) -> 0 (a transposition of the
   first two quarter arcs) */
Iet quarter_swap(const AngleGroup& g) {
    long q = g.m() / 4;
    std::vector<Point> cuts = {point_make(g, 0), point_make(g, 0, angle_make(g, q, {})),
                               point_make(g, 0, angle_make(g, 2 * q, {}))};
    std::vector<Angle> shifts = {angle_make(g, q, {}), angle_make(g, 3 * q, {}),
                                 angle_zero(g)};
    return Iet::from_arcs(std::move(cuts), std::move(shifts));
}

Point torsion_point(const AngleGroup& g, long long p) {
    return point_make(g, 0, angle_make(g, p, {}));
}

} // namespace

TEST_CASE("identity and rotations") {
    AngleGroup g = mixed_group();
    Iet id = Iet::identity(g);
    CHECK(id.is_identity());
    CHECK(id.is_rotation());
    CHECK(id.arc_count() == 1);

    Angle a = angle_make(g, 5, {1, 0});
    Angle b = angle_make(g, 9, {0, 2});
    Iet ra = Iet::rotation(g, a), rb = Iet::rotation(g, b);

    Point x = point_make(g, 1, angle_make(g, 2, {0, -1}));
    CHECK(point_equal(evaluate(id, x), x));
    CHECK(point_equal(evaluate(ra, x), point_translate(x, a)));

    CHECK(iet_equal(compose(ra, rb), Iet::rotation(g, angle_add(a, b))));
    CHECK(iet_equal(inverse(ra), Iet::rotation(g, angle_neg(a))));
    CHECK(compose(ra, inverse(ra)).is_identity());

    CHECK(cocycle(ra).is_identity());
    CHECK(cocycle(id).is_identity());
}

TEST_CASE("three-arc quarter swap behaves like the hand computation") {
    AngleGroup g = pure_torsion(8);
    Iet s = quarter_swap(g);
    CHECK(s.arc_count() == 3);

    // 1/8 lies in [0,1/4): moves up by 1/4 to 3/8
    CHECK(point_equal(evaluate(s, torsion_point(g, 1)), torsion_point(g, 3)));
    // 3/8 lies in [1/4,1/2): moves down to 1/8
    CHECK(point_equal(evaluate(s, torsion_point(g, 3)), torsion_point(g, 1)));
    // 5/8 is fixed
    CHECK(point_equal(evaluate(s, torsion_point(g, 5)), torsion_point(g, 5)));
    // right-continuity at the cuts themselves
    CHECK(point_equal(evaluate(s, torsion_point(g, 0)), torsion_point(g, 2)));
    CHECK(point_equal(evaluate(s, torsion_point(g, 2)), torsion_point(g, 0)));
    CHECK(point_equal(evaluate(s, torsion_point(g, 4)), torsion_point(g, 4)));

    CHECK(compose(s, s).is_identity()); // involution
    CHECK(iet_equal(inverse(s), s));

    // left-continuous companion at 1/4: limit from the arc [0,1/4), so 1/2
    CHECK(point_equal(companion_evaluate(s, torsion_point(g, 2)), torsion_point(g, 4)));
    // away from cuts the companion agrees with the map
    CHECK(point_equal(companion_evaluate(s, torsion_point(g, 1)), torsion_point(g, 3)));
}

TEST_CASE("cocycle of the quarter swap is the expected 3-cycle") {
    AngleGroup g = pure_torsion(4);
    Iet s = quarter_swap(g);
    FinSuppPerm tau = cocycle(s);

    Point p0 = torsion_point(g, 0), p1 = torsion_point(g, 1), p2 = torsion_point(g, 2);
    CHECK(tau.support_size() == 3);
    CHECK(point_equal(tau.apply(p0), p2)); // 0 -> 1/2
    CHECK(point_equal(tau.apply(p2), p1)); // 1/2 -> 1/4
    CHECK(point_equal(tau.apply(p1), p0)); // 1/4 -> 0

    std::vector<Point> supp = support_map(tau);
    REQUIRE(supp.size() == 3);
    CHECK(point_equal(supp[0], p0));
    CHECK(point_equal(supp[1], p1));
    CHECK(point_equal(supp[2], p2));

    // one full cycle: tau^3 = identity
    CHECK(perm_multiply(perm_multiply(tau, tau), tau).is_identity());
}

TEST_CASE("construction validates tiling and duplicates") {
    AngleGroup g = pure_torsion(8);
    // overlapping images: [0,1/2)->+1/4 and [1/2,1)->0
    std::vector<Point> cuts = {torsion_point(g, 0), torsion_point(g, 4)};
    std::vector<Angle> shifts = {angle_make(g, 2, {}), angle_zero(g)};
    CHECK_THROWS_AS(Iet::from_arcs(cuts, shifts), config_error);

    std::vector<Point> dup = {torsion_point(g, 0), torsion_point(g, 0)};
    std::vector<Angle> z2 = {angle_zero(g), angle_zero(g)};
    CHECK_THROWS_AS(Iet::from_arcs(dup, z2), config_error);

    // all-equal shifts collapse to a rotation regardless of cuts
    std::vector<Point> c2 = {torsion_point(g, 0), torsion_point(g, 4)};
    std::vector<Angle> s2 = {angle_make(g, 3, {}), angle_make(g, 3, {})};
    Iet r = Iet::from_arcs(c2, s2);
    CHECK(r.is_rotation());
    CHECK(iet_equal(r, Iet::rotation(g, angle_make(g, 3, {}))));
}

TEST_CASE("group axioms hold exactly on pseudo-random exchanges") {
    AngleGroup g = mixed_group();
    SplitMix64 rng(20240817);
    for (int trial = 0; trial < 25; ++trial) {
        Iet f = random_iet(g, rng, 2 + static_cast<int>(rng.below(3)));
        Iet h = random_iet(g, rng, 2 + static_cast<int>(rng.below(3)), 1);
        Iet k = random_iet(g, rng, 2 + static_cast<int>(rng.below(3)));

        CHECK(iet_equal(compose(compose(f, h), k), compose(f, compose(h, k))));
        CHECK(compose(f, inverse(f)).is_identity());
        CHECK(compose(inverse(f), f).is_identity());
        CHECK(iet_equal(compose(f, Iet::identity(g)), f));

        // composition acts pointwise, across both base cosets
        for (int b = 0; b < 2; ++b) {
            Point x = point_make(g, b,
                                 angle_make(g, static_cast<long long>(rng.below(12)),
                                            {static_cast<long long>(rng.below(5)) - 2,
                                             static_cast<long long>(rng.below(5)) - 2}));
            CHECK(point_equal(evaluate(compose(f, h), x), evaluate(f, evaluate(h, x))));
        }
    }
}

TEST_CASE("inverse breakpoint count matches and round-trips") {
    AngleGroup g = mixed_group();
    SplitMix64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        Iet f = random_iet(g, rng, 4);
        Iet fi = inverse(f);
        CHECK(fi.arc_count() == f.arc_count());
        CHECK(iet_equal(inverse(fi), f));
    }
}

TEST_CASE("cocycle satisfies the twisted product rule") {
    AngleGroup g = mixed_group();
    SplitMix64 rng(99);
    for (int trial = 0; trial < 12; ++trial) {
        Iet a = random_iet(g, rng, 2 + static_cast<int>(rng.below(3)));
        Iet b = random_iet(g, rng, 2 + static_cast<int>(rng.below(3)), 1);

        FinSuppPerm lhs = cocycle(compose(a, b));
        FinSuppPerm rhs = perm_multiply(cocycle(a), perm_conjugate(a, cocycle(b)));
        CHECK(perm_equal(lhs, rhs));

        // same law phrased through the twisted embedding
        SemidirectElement prod = semidirect_multiply(twisted_embed(a), twisted_embed(b));
        CHECK(semidirect_equal(prod, twisted_embed(compose(a, b))));

        SemidirectElement inv = semidirect_multiply(prod, semidirect_inverse(prod));
        CHECK(perm_equal(inv.perm, FinSuppPerm{}));
        CHECK(inv.iet.is_identity());
    }
}

TEST_CASE("cocycle is trivial exactly for rotations") {
    AngleGroup g = mixed_group();
    SplitMix64 rng(5);
    int nontrivial = 0;
    for (int trial = 0; trial < 10; ++trial) {
        Iet f = random_iet(g, rng, 3);
        if (f.is_rotation())
            CHECK(cocycle(f).is_identity());
        else {
            CHECK(!cocycle(f).is_identity());
            ++nontrivial;
        }
    }
    CHECK(nontrivial > 0);
}

TEST_CASE("permutation support transforms equivariantly under conjugation") {
    AngleGroup g = mixed_group();
    SplitMix64 rng(1234);
    Iet f = random_iet(g, rng, 4);
    Iet h = random_iet(g, rng, 3, 1);
    FinSuppPerm tau = cocycle(h);

    std::vector<Point> before = support_map(tau);
    std::vector<Point> after = support_map(perm_conjugate(f, tau));
    REQUIRE(before.size() == after.size());
    std::vector<Point> mapped;
    for (const Point& x : before) mapped.push_back(evaluate(f, x));
    std::sort(mapped.begin(), mapped.end(),
              [](const Point& a, const Point& b) { return point_compare(a, b) < 0; });
    for (std::size_t i = 0; i < mapped.size(); ++i) CHECK(point_equal(mapped[i], after[i]));
}

TEST_CASE("finitely supported permutations validate their input") {
    AngleGroup g = pure_torsion(8);
    Point a = torsion_point(g, 0), b = torsion_point(g, 1), c = torsion_point(g, 2);

    // not a bijection: two points map to the same image
    CHECK_THROWS_AS(FinSuppPerm::from_pairs({{a, c}, {b, c}}), config_error);
    // domain != range
    CHECK_THROWS_AS(FinSuppPerm::from_pairs({{a, b}}), config_error);

    FinSuppPerm cyc = FinSuppPerm::from_cycle({a, b, c});
    CHECK(cyc.support_size() == 3);
    CHECK(perm_multiply(cyc, perm_inverse(cyc)).is_identity());
    FinSuppPerm swap2 = FinSuppPerm::from_cycle({a, b});
    CHECK(perm_equal(perm_inverse(swap2), swap2));
}

TEST_CASE("text form round-trips bit-exactly") {
    AngleGroup g = mixed_group();
    SplitMix64 rng(42);
    for (int trial = 0; trial < 8; ++trial) {
        Iet f = random_iet(g, rng, 2 + static_cast<int>(rng.below(4)));
        std::string s = iet_str(f);
        Iet f2 = iet_parse(g, s);
        CHECK(iet_equal(f, f2));
        CHECK(iet_str(f2) == s);
    }
    Iet r = Iet::rotation(g, angle_make(g, 5, {1, -2}));
    CHECK(iet_str(r) == "rot 5/12 + [1,-2]·θ");
    CHECK(iet_equal(iet_parse(g, iet_str(r)), r));
}

TEST_CASE("rational rank of translation coordinates") {
    AngleGroup g = mixed_group();

    // all-rational translations: rank 0
    Iet r0 = Iet::rotation(g, angle_make(g, 5, {0, 0}));
    CHECK(rational_rank({r0}) == 0);

    // k rows [1,0] and [1,1] span rank 2
    Iet r1 = Iet::rotation(g, angle_make(g, 0, {1, 0}));
    Iet r2 = Iet::rotation(g, angle_make(g, 0, {1, 1}));
    CHECK(rational_rank({r1, r2}) == 2);
    CHECK(rational_rank({r1}) == 1);
    // dependent rows keep rank 1: [1,0],[2,0],[-3,0]
    Iet r3 = Iet::rotation(g, angle_make(g, 1, {2, 0}));
    Iet r4 = Iet::rotation(g, angle_make(g, 2, {-3, 0}));
    CHECK(rational_rank({r1, r3, r4}) == 1);

    std::vector<RealEnclosure> theta3 = {RealEnclosure::sqrt_affine(2, 1, -1),
                                         RealEnclosure::sqrt_affine(3, 1, -1),
                                         RealEnclosure::sqrt_affine(5, 1, -2)};
    AngleGroup g3(1, std::move(theta3), {RealEnclosure::exact(0)});
    Iet rr = Iet::rotation(g3, angle_make(g3, 0, {1, 0, 0}));
    CHECK(rational_rank({rr}) == 1);
}

/* independent oracle: rank via rational row reduction, implemented directly
   here with dense mpq arithmetic */
static int mpq_rank(std::vector<std::vector<mpz_class>> m) {
    if (m.empty()) return 0;
    std::vector<std::vector<mpq_class>> q(m.size(), std::vector<mpq_class>(m[0].size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[0].size(); ++j) q[i][j] = mpq_class(m[i][j]);
    int rank = 0;
    const int rows = static_cast<int>(q.size()), cols = static_cast<int>(q[0].size());
    for (int c = 0; c < cols && rank < rows; ++c) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (q[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(q[rank], q[piv]);
        for (int r = 0; r < rows; ++r) {
            if (r == rank || q[r][c] == 0) continue;
            mpq_class f = q[r][c] / q[rank][c];
            for (int cc = c; cc < cols; ++cc) q[r][cc] -= f * q[rank][cc];
        }
        ++rank;
    }
    return rank;
}

TEST_CASE("fraction-free rank agrees with a rational elimination oracle") {
    SplitMix64 rng(777);
    for (int trial = 0; trial < 40; ++trial) {
        int rows = 1 + static_cast<int>(rng.below(5));
        int cols = 1 + static_cast<int>(rng.below(4));
        std::vector<std::vector<mpz_class>> m(rows, std::vector<mpz_class>(cols));
        for (auto& row : m)
            for (auto& v : row) v = static_cast<long>(rng.below(7)) - 3;
        // sprinkle in exact linear dependencies
        if (rows >= 2 && rng.below(2) == 0)
            for (int j = 0; j < cols; ++j) m[rows - 1][j] = m[0][j] * 2 - m[rows / 2][j];
        CHECK(integer_matrix_rank(m) == mpq_rank(m));
    }
}
