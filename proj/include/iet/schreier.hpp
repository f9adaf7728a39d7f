#pragma once
#include "iet/iet.hpp"
#include "iet/stats.hpp"

namespace iet {

/* Orbit graph of a generated action restricted to a radius-n ball around a
   base point.  Vertices are in BFS discovery order (layer by layer, within a
   layer by parent index then generator id), so construction is
   deterministic.  The edge list is the full induced labelled graph: one
   entry (u, i, v) whenever generator i maps vertex u to vertex v, both
   inside the ball; with a generator list closed under inverses the relation
   is symmetric. */
struct SchreierBall {
    std::vector<Point> vertices;
    std::vector<std::array<int, 3>> edges; // (vertex, generator id, vertex)
    long radius = 0;
};

/* BFS with exact point deduplication.  Requires the generator list to be
   closed under inverses (checked; config_error otherwise). */
SchreierBall schreier_ball(const std::vector<Iet>& gens, const Point& x0, long radius);

/* DOT text export, vertices labelled by their exact coordinates. */
std::string schreier_dot(const SchreierBall& ball);

/* Difference coordinates y - x0 per vertex, with the coordinate step size
   of every edge.  All vertices must lie in the coset of x0 (they always do
   when the ball was grown from x0 itself).  Injectivity of the coordinate
   map is asserted.  The l1 size of an angle counts the free coordinates
   plus the circular torsion displacement min(p, m-p). */
struct LambdaEmbedding {
    std::vector<Angle> coords;
    double lipschitz = 0; // max edge step in the l1 coordinate size
};

LambdaEmbedding lambda_embedding(const SchreierBall& ball, const Point& x0);

long angle_l1(const Angle& a);

/* Cut points of the point-doubling partition: for each selected base x and
   each generator angle lambda, the pair {x, x + lambda}.  Sorted circularly;
   the atoms are the arcs between consecutive cut points, so there are as
   many atoms as cut points. */
struct CutPartition {
    std::vector<Point> cuts;
    std::size_t atom_count() const { return cuts.size(); }
};

CutPartition subshift_cutpoints(const AngleGroup& g, const std::vector<int>& bases,
                                const std::vector<Angle>& S);

/* rho(n) = number of distinct translates of the cut points by words of
   length <= n in the given angles (coefficient vectors a with sum |a_i| <= n,
   since the angle group is abelian).  The growth exponent is fitted by least
   squares on log rho vs log n over the top half of the range. */
struct ComplexityProfile {
    std::vector<long> rho; // index n = 0..n_max
    double exponent = 0;
    double exponent_stderr = 0;
    double empirical_c = 0; // max over n >= 1 of rho(n) / n^d
};

ComplexityProfile complexity_profile(const AngleGroup& g, const std::vector<int>& bases,
                                     const std::vector<Angle>& S, long n_max);

std::string complexity_csv(const ComplexityProfile& p);

} // namespace iet
