#include "iet/schreier.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace iet {

SchreierBall schreier_ball(const std::vector<Iet>& gens, const Point& x0, long radius) {
    if (gens.empty()) throw config_error("empty generator list");
    if (radius < 0) throw config_error("negative radius");
    for (const auto& g : gens) {
        Iet gi = inverse(g);
        bool found = false;
        for (const auto& h : gens)
            if (iet_equal(h, gi)) {
                found = true;
                break;
            }
        if (!found) throw config_error("generator list is not closed under inverses");
    }

    SchreierBall ball;
    ball.radius = radius;
    std::unordered_map<Point, int, PointHash, PointEq> index;
    std::vector<long> dist;
    ball.vertices.push_back(x0);
    index.emplace(x0, 0);
    dist.push_back(0);
    for (std::size_t u = 0; u < ball.vertices.size(); ++u) {
        if (dist[u] == radius) break; // BFS order: all later vertices are as deep
        for (const auto& g : gens) {
            Point v = evaluate(g, ball.vertices[u]);
            if (index.emplace(v, static_cast<int>(ball.vertices.size())).second) {
                ball.vertices.push_back(v);
                dist.push_back(dist[u] + 1);
            }
        }
    }
    for (std::size_t u = 0; u < ball.vertices.size(); ++u)
        for (std::size_t i = 0; i < gens.size(); ++i) {
            Point v = evaluate(gens[i], ball.vertices[u]);
            auto it = index.find(v);
            if (it != index.end())
                ball.edges.push_back({static_cast<int>(u), static_cast<int>(i), it->second});
        }
    return ball;
}

std::string schreier_dot(const SchreierBall& ball) {
    std::ostringstream os;
    os << "digraph schreier {\n";
    for (std::size_t i = 0; i < ball.vertices.size(); ++i)
        os << "  v" << i << " [label=\"" << point_str(ball.vertices[i]) << "\"];\n";
    for (const auto& e : ball.edges)
        os << "  v" << e[0] << " -> v" << e[2] << " [label=\"g" << e[1] << "\"];\n";
    os << "}\n";
    return os.str();
}

long angle_l1(const Angle& a) {
    long long t = std::min(a.p, a.group->m() - a.p);
    for (long long c : a.k) t += c < 0 ? -c : c;
    return static_cast<long>(t);
}

LambdaEmbedding lambda_embedding(const SchreierBall& ball, const Point& x0) {
    LambdaEmbedding out;
    std::unordered_set<std::uint64_t> seen;
    for (const auto& v : ball.vertices) {
        if (v.group != x0.group || v.base != x0.base)
            throw config_error("vertex outside the coset of the base point: " + point_str(v));
        Angle c = angle_add(point_offset(v), angle_neg(point_offset(x0)));
        if (!seen.insert(angle_hash(c)).second) {
            // hash collision or genuine duplicate: decide exactly
            for (const auto& prev : out.coords)
                if (angle_equal(prev, c))
                    throw std::logic_error("coordinate map is not injective on the ball");
        }
        out.coords.push_back(std::move(c));
    }
    for (const auto& e : ball.edges) {
        Angle step = angle_add(out.coords[static_cast<std::size_t>(e[2])],
                               angle_neg(out.coords[static_cast<std::size_t>(e[0])]));
        out.lipschitz = std::max(out.lipschitz, static_cast<double>(angle_l1(step)));
    }
    return out;
}

CutPartition subshift_cutpoints(const AngleGroup& g, const std::vector<int>& bases,
                                const std::vector<Angle>& S) {
    if (g.d() < 1)
        throw config_error("the angle lattice is finite; the doubling partition needs an "
                           "infinite minimal action");
    if (bases.empty()) throw config_error("no base points selected");
    if (S.empty()) throw config_error("empty angle generating set");
    for (int b : bases)
        if (b < 0 || b >= g.base_count()) throw config_error("base index out of range");

    std::vector<Point> pts;
    for (int b : bases) {
        Point x = point_make(g, b);
        pts.push_back(x);
        for (const auto& lam : S) pts.push_back(point_translate(x, lam));
    }
    std::sort(pts.begin(), pts.end(),
              [](const Point& a, const Point& b) { return point_compare(a, b) < 0; });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point& a, const Point& b) { return point_equal(a, b); }),
              pts.end());
    return CutPartition{std::move(pts)};
}

ComplexityProfile complexity_profile(const AngleGroup& g, const std::vector<int>& bases,
                                     const std::vector<Angle>& S, long n_max) {
    if (n_max < 1) throw config_error("n_max must be at least 1");
    CutPartition part = subshift_cutpoints(g, bases, S);

    /* enumerate coefficient vectors shell by shell: |a|_1 = n exactly */
    std::unordered_set<Point, PointHash, PointEq> seen;
    ComplexityProfile out;
    const std::size_t s = S.size();
    std::vector<long long> a(s, 0);
    std::vector<Angle> neg;
    for (const auto& lam : S) neg.push_back(angle_neg(lam));

    auto translate_by = [&](const Point& c) {
        Point y = c;
        for (std::size_t i = 0; i < s; ++i) {
            long long n = a[i];
            const Angle& step = n >= 0 ? S[i] : neg[i];
            for (long long t = 0; t < (n >= 0 ? n : -n); ++t) y = point_translate(y, step);
        }
        return y;
    };

    // all sign patterns and compositions of weight exactly `shell`
    auto for_shell = [&](long shell, auto&& visit) {
        auto rec = [&](auto&& self, std::size_t i, long rem) -> void {
            if (i + 1 == s) {
                a[i] = rem;
                visit();
                if (rem > 0) {
                    a[i] = -rem;
                    visit();
                }
                return;
            }
            for (long v = 0; v <= rem; ++v) {
                a[i] = v;
                self(self, i + 1, rem - v);
                if (v > 0) {
                    a[i] = -v;
                    self(self, i + 1, rem - v);
                }
            }
        };
        rec(rec, 0, shell);
    };

    for (long n = 0; n <= n_max; ++n) {
        for_shell(n, [&] {
            for (const auto& c : part.cuts) seen.insert(translate_by(c));
        });
        out.rho.push_back(static_cast<long>(seen.size()));
    }

    std::vector<double> xs, ys;
    for (long n = std::max<long>(1, n_max / 2); n <= n_max; ++n) {
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(std::log(static_cast<double>(out.rho[static_cast<std::size_t>(n)])));
    }
    LineFit fit = fit_line(xs, ys);
    out.exponent = fit.slope;
    out.exponent_stderr = fit.slope_stderr;
    for (long n = 1; n <= n_max; ++n)
        out.empirical_c = std::max(out.empirical_c,
                                   static_cast<double>(out.rho[static_cast<std::size_t>(n)]) /
                                       std::pow(static_cast<double>(n), g.d()));
    return out;
}

std::string complexity_csv(const ComplexityProfile& p) {
    std::ostringstream os;
    os << "n,rho\n";
    for (std::size_t n = 0; n < p.rho.size(); ++n) os << n << "," << p.rho[n] << "\n";
    return os.str();
}

} // namespace iet
