#include "iet/iet.hpp"
#include "iet/errors.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace iet {

namespace {

using PointSet = std::unordered_set<Point, PointHash, PointEq>;

void check_same_group(const AngleGroup* a, const AngleGroup* b) {
    if (a != b) throw config_error("operands over different angle groups");
}

} // namespace

void Iet::finalize() {
    shift_reps_.resize(shifts_.size());
    for (std::size_t i = 0; i < shifts_.size(); ++i) shift_reps_[i] = angle_rep_approx(shifts_[i]);
}

Iet Iet::identity(const AngleGroup& g) { return rotation(g, angle_zero(g)); }

Iet Iet::rotation(const AngleGroup& g, const Angle& a) {
    check_same_group(&g, a.group);
    Iet r;
    r.group_ = &g;
    r.shifts_ = {a};
    r.finalize();
    return r;
}

Iet Iet::from_arcs(std::vector<Point> cuts, std::vector<Angle> shifts) {
    if (shifts.empty()) throw config_error("an interval exchange needs at least one arc");
    if (cuts.empty()) {
        if (shifts.size() != 1)
            throw config_error("multiple translations but no cuts");
        return rotation(*shifts[0].group, shifts[0]);
    }
    if (cuts.size() != shifts.size())
        throw config_error("cut and translation counts differ");
    const AngleGroup* grp = cuts[0].group;
    for (const Point& c : cuts) check_same_group(grp, c.group);
    for (const Angle& s : shifts) check_same_group(grp, s.group);

    const int r = static_cast<int>(cuts.size());
    std::vector<int> order(r);
    for (int i = 0; i < r; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return point_compare(cuts[a], cuts[b]) < 0; });
    std::vector<Point> c2;
    std::vector<Angle> s2;
    c2.reserve(r);
    s2.reserve(r);
    for (int i : order) {
        if (!c2.empty() && point_equal(c2.back(), cuts[i]))
            throw config_error("duplicate cut point " + point_str(cuts[i]));
        c2.push_back(cuts[i]);
        s2.push_back(shifts[i]);
    }

    /* bijectivity: translated arcs must tile the circle.  Sort image arcs by
       left endpoint; each right endpoint must coincide (as exact
       coordinates) with the next left endpoint, cyclically. */
    std::vector<Point> img_left(r), img_right(r);
    for (int i = 0; i < r; ++i) {
        img_left[i] = point_translate(c2[i], s2[i]);
        img_right[i] = point_translate(c2[(i + 1) % r], s2[i]);
    }
    std::vector<int> iord(r);
    for (int i = 0; i < r; ++i) iord[i] = i;
    std::sort(iord.begin(), iord.end(),
              [&](int a, int b) { return point_compare(img_left[a], img_left[b]) < 0; });
    for (int j = 0; j < r; ++j) {
        const Point& right = img_right[iord[j]];
        const Point& next_left = img_left[iord[(j + 1) % r]];
        if (!point_equal(right, next_left))
            throw config_error("translated arcs do not tile the circle near " + point_str(right));
    }

    // canonical form: drop every cut whose arc repeats the previous translation
    std::vector<Point> c3;
    std::vector<Angle> s3;
    for (int i = 0; i < r; ++i) {
        if (!angle_equal(s2[i], s2[(i + r - 1) % r])) {
            c3.push_back(c2[i]);
            s3.push_back(s2[i]);
        }
    }
    if (c3.empty()) return rotation(*grp, s2[0]);

    Iet out;
    out.group_ = grp;
    out.cuts_ = std::move(c3);
    out.shifts_ = std::move(s3);
    out.finalize();
    return out;
}

int arc_index(const Iet& g, const Point& x) {
    const std::vector<Point>& cs = g.cuts();
    const int r = static_cast<int>(cs.size());
    if (r == 0) return 0;
    // count cuts <= x
    int lo = 0, hi = r;
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (point_compare(cs[mid], x) <= 0)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo == 0 ? r - 1 : lo - 1;
}

Point evaluate(const Iet& g, const Point& x) {
    check_same_group(&g.group(), x.group);
    int i = arc_index(g, x);
    const ApproxRep& rep = g.shift_rep(i);
    return point_translate(x, g.shift(i), rep.rep, rep.err);
}

Point companion_evaluate(const Iet& g, const Point& x) {
    check_same_group(&g.group(), x.group);
    const std::vector<Point>& cs = g.cuts();
    const int r = static_cast<int>(cs.size());
    if (r == 0) return evaluate(g, x);
    int lo = 0, hi = r;
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (point_compare(cs[mid], x) <= 0)
            lo = mid + 1;
        else
            hi = mid;
    }
    int i = lo == 0 ? r - 1 : lo - 1;
    // exactly on a cut: the left limit comes from the arc ending there
    if (lo > 0 && point_equal(cs[lo - 1], x)) i = (i + r - 1) % r;
    const ApproxRep& rep = g.shift_rep(i);
    return point_translate(x, g.shift(i), rep.rep, rep.err);
}

Iet compose(const Iet& f, const Iet& g) {
    check_same_group(&f.group(), &g.group());
    if (f.is_rotation() && g.is_rotation())
        return Iet::rotation(f.group(), angle_add(f.shift(0), g.shift(0)));

    // refinement: g's cuts plus g-preimages of f's cuts
    std::vector<Point> cand = g.cuts();
    if (!f.is_rotation()) {
        Iet gi = inverse(g);
        for (const Point& c : f.cuts()) cand.push_back(evaluate(gi, c));
    }
    PointSet seen;
    std::vector<Point> cuts;
    for (const Point& c : cand)
        if (seen.insert(c).second) cuts.push_back(c);

    std::vector<Angle> shifts;
    shifts.reserve(cuts.size());
    for (const Point& c : cuts) {
        const Angle& tg = g.shift(arc_index(g, c));
        Point y = evaluate(g, c);
        const Angle& tf = f.shift(arc_index(f, y));
        shifts.push_back(angle_add(tg, tf));
    }
    return Iet::from_arcs(std::move(cuts), std::move(shifts));
}

Iet inverse(const Iet& g) {
    if (g.is_rotation()) return Iet::rotation(g.group(), angle_neg(g.shift(0)));
    const int r = g.arc_count();
    std::vector<Point> cuts(r);
    std::vector<Angle> shifts(r);
    for (int i = 0; i < r; ++i) {
        cuts[i] = point_translate(g.cut(i), g.shift(i));
        shifts[i] = angle_neg(g.shift(i));
    }
    return Iet::from_arcs(std::move(cuts), std::move(shifts));
}

bool iet_equal(const Iet& a, const Iet& b) {
    if (&a.group() != &b.group() || a.arc_count() != b.arc_count()) return false;
    for (int i = 0; i < a.arc_count(); ++i)
        if (!angle_equal(a.shift(i), b.shift(i))) return false;
    for (std::size_t i = 0; i < a.cuts().size(); ++i)
        if (!point_equal(a.cut(static_cast<int>(i)), b.cut(static_cast<int>(i)))) return false;
    return true;
}

std::string iet_str(const Iet& g) {
    if (g.is_rotation()) return "rot " + angle_str(g.shift(0));
    std::ostringstream os;
    for (int i = 0; i < g.arc_count(); ++i) {
        if (i) os << " ; ";
        os << point_str(g.cut(i)) << " => " << angle_str(g.shift(i));
    }
    return os.str();
}

Iet iet_parse(const AngleGroup& grp, std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
        return s;
    };
    std::string_view body = trim(text);
    if (body.substr(0, 4) == "rot ")
        return Iet::rotation(grp, angle_parse(grp, body.substr(4)));
    std::vector<Point> cuts;
    std::vector<Angle> shifts;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        std::size_t semi = body.find(';', pos);
        std::string_view item =
            trim(body.substr(pos, semi == std::string_view::npos ? semi : semi - pos));
        std::size_t arrow = item.find("=>");
        if (arrow == std::string_view::npos)
            throw config_error("expected 'cut => shift' in '" + std::string(item) + "'");
        cuts.push_back(point_parse(grp, trim(item.substr(0, arrow))));
        shifts.push_back(angle_parse(grp, trim(item.substr(arrow + 2))));
        if (semi == std::string_view::npos) break;
        pos = semi + 1;
    }
    return Iet::from_arcs(std::move(cuts), std::move(shifts));
}

FinSuppPerm FinSuppPerm::from_pairs(const std::vector<std::pair<Point, Point>>& pairs) {
    FinSuppPerm p;
    PointSet range;
    for (const auto& [x, y] : pairs) {
        if (point_equal(x, y)) continue;
        if (!p.map_.emplace(x, y).second)
            throw config_error("repeated domain point " + point_str(x));
        if (!range.insert(y).second) throw config_error("repeated image point " + point_str(y));
    }
    for (const auto& [x, y] : p.map_)
        if (!range.count(x))
            throw config_error("domain and range differ at " + point_str(x));
    return p;
}

FinSuppPerm FinSuppPerm::from_cycle(const std::vector<Point>& cycle) {
    std::vector<std::pair<Point, Point>> pairs;
    const std::size_t n = cycle.size();
    for (std::size_t i = 0; i < n; ++i) pairs.emplace_back(cycle[i], cycle[(i + 1) % n]);
    return from_pairs(pairs);
}

Point FinSuppPerm::apply(const Point& x) const {
    auto it = map_.find(x);
    return it == map_.end() ? x : it->second;
}

FinSuppPerm perm_multiply(const FinSuppPerm& a, const FinSuppPerm& b) {
    PointSet domain;
    for (const auto& [x, y] : a.pairs()) domain.insert(x);
    for (const auto& [x, y] : b.pairs()) domain.insert(x);
    std::vector<std::pair<Point, Point>> pairs;
    pairs.reserve(domain.size());
    for (const Point& x : domain) pairs.emplace_back(x, a.apply(b.apply(x)));
    return FinSuppPerm::from_pairs(pairs);
}

FinSuppPerm perm_inverse(const FinSuppPerm& a) {
    std::vector<std::pair<Point, Point>> pairs;
    pairs.reserve(a.support_size());
    for (const auto& [x, y] : a.pairs()) pairs.emplace_back(y, x);
    return FinSuppPerm::from_pairs(pairs);
}

FinSuppPerm perm_conjugate(const Iet& g, const FinSuppPerm& sigma) {
    std::vector<std::pair<Point, Point>> pairs;
    pairs.reserve(sigma.support_size());
    for (const auto& [x, y] : sigma.pairs())
        pairs.emplace_back(evaluate(g, x), evaluate(g, y));
    return FinSuppPerm::from_pairs(pairs);
}

bool perm_equal(const FinSuppPerm& a, const FinSuppPerm& b) {
    if (a.support_size() != b.support_size()) return false;
    for (const auto& [x, y] : a.pairs()) {
        auto it = b.pairs().find(x);
        if (it == b.pairs().end() || !point_equal(it->second, y)) return false;
    }
    return true;
}

std::vector<Point> support_map(const FinSuppPerm& a) {
    std::vector<Point> pts;
    pts.reserve(a.support_size());
    for (const auto& [x, y] : a.pairs()) pts.push_back(x);
    std::sort(pts.begin(), pts.end(), [](const Point& p, const Point& q) {
        return point_compare(p, q) < 0;
    });
    return pts;
}

FinSuppPerm cocycle(const Iet& g) {
    const AngleGroup& grp = g.group();
    Iet gi = inverse(g);

    PointSet candidates;
    for (const Point& c : g.cuts()) candidates.insert(c);
    for (const Point& c : gi.cuts()) candidates.insert(c);

    FinSuppPerm tau;
    std::vector<std::pair<Point, Point>> pairs;
    for (const Point& x : candidates) {
        Point y = companion_evaluate(g, evaluate(gi, x));
        if (!point_equal(x, y)) pairs.emplace_back(x, y);
    }
    tau = FinSuppPerm::from_pairs(pairs);

    /* invariant from the construction: the support is exactly the
       discontinuity set of the inverse */
    if (tau.support_size() != gi.cuts().size())
        throw std::logic_error("cocycle support does not match the inverse's cuts");
    for (const Point& c : gi.cuts())
        if (!tau.pairs().count(c))
            throw std::logic_error("cocycle support does not match the inverse's cuts");

    /* pseudo-random sample nearby must be fixed: the companion and the map
       agree away from the cuts */
    std::uint64_t salt = 0;
    for (const Point& x : candidates) {
        for (int probe = 0; probe < 2; ++probe) {
            std::uint64_t h = mix64(++salt * 0x2545f4914f6cdd1dULL);
            coord_vec k(static_cast<std::size_t>(grp.d()), 0);
            long long p = static_cast<long long>(h % static_cast<std::uint64_t>(grp.m()));
            for (int i = 0; i < grp.d(); ++i)
                k[static_cast<std::size_t>(i)] =
                    static_cast<long long>((h >> (8 + 4 * i)) % 7) - 3;
            Angle delta = angle_make(grp, p, k);
            if (angle_is_zero(delta)) delta = angle_make(grp, 1, std::move(k));
            if (angle_is_zero(delta)) continue; // trivial angle group
            Point z = point_translate(x, delta);
            if (candidates.count(z)) continue;
            Point w = companion_evaluate(g, evaluate(gi, z));
            if (!point_equal(w, z))
                throw std::logic_error("cocycle moved a point off the inverse's cuts");
        }
    }
    return tau;
}

SemidirectElement semidirect_identity(const AngleGroup& g) {
    return {FinSuppPerm{}, Iet::identity(g)};
}

SemidirectElement semidirect_multiply(const SemidirectElement& u, const SemidirectElement& v) {
    return {perm_multiply(u.perm, perm_conjugate(u.iet, v.perm)), compose(u.iet, v.iet)};
}

SemidirectElement semidirect_inverse(const SemidirectElement& u) {
    Iet gi = inverse(u.iet);
    return {perm_conjugate(gi, perm_inverse(u.perm)), gi};
}

bool semidirect_equal(const SemidirectElement& u, const SemidirectElement& v) {
    return perm_equal(u.perm, v.perm) && iet_equal(u.iet, v.iet);
}

SemidirectElement twisted_embed(const Iet& g) { return {cocycle(g), g}; }

int integer_matrix_rank(std::vector<std::vector<mpz_class>> m) {
    const int rows = static_cast<int>(m.size());
    if (rows == 0) return 0;
    const int cols = static_cast<int>(m[0].size());
    int rank = 0;
    mpz_class prev(1);
    for (int c = 0; c < cols && rank < rows; ++c) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (m[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(m[rank], m[piv]);
        for (int r = rank + 1; r < rows; ++r) {
            for (int cc = c + 1; cc < cols; ++cc) {
                m[r][cc] = m[rank][c] * m[r][cc] - m[r][c] * m[rank][cc];
                mpz_divexact(m[r][cc].get_mpz_t(), m[r][cc].get_mpz_t(), prev.get_mpz_t());
            }
            m[r][c] = 0;
        }
        prev = m[rank][c];
        ++rank;
    }
    return rank;
}

Iet random_iet(const AngleGroup& g, SplitMix64& rng, int arcs, int base) {
    if (arcs < 1) throw config_error("arc count must be positive");
    std::vector<Angle> offs;
    int attempts = 0;
    while (static_cast<int>(offs.size()) < arcs) {
        if (++attempts > 64 * arcs)
            throw config_error("angle group too small for the requested arc count");
        long long p = static_cast<long long>(rng.below(static_cast<std::uint64_t>(g.m())));
        coord_vec k(static_cast<std::size_t>(g.d()), 0);
        for (int i = 0; i < g.d(); ++i)
            k[static_cast<std::size_t>(i)] = static_cast<long long>(rng.below(7)) - 3;
        Angle a = angle_make(g, p, std::move(k));
        bool dup = false;
        for (const Angle& b : offs)
            if (angle_equal(a, b)) dup = true;
        if (!dup) offs.push_back(std::move(a));
    }

    std::vector<Point> cuts;
    cuts.reserve(offs.size());
    for (const Angle& a : offs) cuts.push_back(point_make(g, base, a));
    std::vector<int> idx(offs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return point_compare(cuts[a], cuts[b]) < 0; });
    std::vector<Angle> sorted_offs;
    std::vector<Point> sorted_cuts;
    for (int i : idx) {
        sorted_offs.push_back(offs[i]);
        sorted_cuts.push_back(cuts[i]);
    }

    const int r = arcs;
    std::vector<Angle> len;
    len.reserve(r);
    for (int i = 0; i < r; ++i)
        len.push_back(angle_add(sorted_offs[(i + 1) % r], angle_neg(sorted_offs[i])));

    std::vector<int> perm(r);
    for (int i = 0; i < r; ++i) perm[i] = i;
    for (int i = r - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i + 1))]);

    // lay the shuffled arcs back end-to-end starting from the first cut
    std::vector<Angle> shifts(r, angle_zero(g));
    Angle slot = sorted_offs[0];
    for (int j = 0; j < r; ++j) {
        int i = perm[j];
        shifts[i] = angle_add(slot, angle_neg(sorted_offs[i]));
        slot = angle_add(slot, len[i]);
    }
    return Iet::from_arcs(std::move(sorted_cuts), std::move(shifts));
}

int rational_rank(const std::vector<Iet>& gens) {
    if (gens.empty()) throw config_error("rank of an empty generator list");
    const AngleGroup& g = gens[0].group();
    std::vector<std::vector<mpz_class>> m;
    for (const Iet& gen : gens) {
        check_same_group(&g, &gen.group());
        for (const Angle& s : gen.shifts()) {
            std::vector<mpz_class> row;
            row.reserve(s.k.size());
            for (long long c : s.k) row.emplace_back(static_cast<long>(c));
            m.push_back(std::move(row));
        }
    }
    if (g.d() == 0) return 0;
    return integer_matrix_rank(std::move(m));
}

} // namespace iet
