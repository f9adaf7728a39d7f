#pragma once
#include "iet/iet.hpp"

#include <unordered_set>
#include <vector>

namespace iet {

/* Finitely supported Z/2 configuration on the circle, identified with its
   finite set of lit points. */
struct LampConfig {
    std::unordered_set<Point, PointHash, PointEq> lit;
};

LampConfig lamp_make(const std::vector<Point>& pts);
LampConfig lamp_xor(const LampConfig& a, const LampConfig& b);
LampConfig lamp_translate(const Iet& g, const LampConfig& a); // {g(x) : x lit}
bool lamp_lit(const LampConfig& a, const Point& x);
bool lamp_equal(const LampConfig& a, const LampConfig& b);
std::vector<Point> support_map(const LampConfig& a); // lit points in circle order
std::string lamp_str(const LampConfig& a);

/* Switch-walk-switch driver data: a symmetric finitely supported measure on
   a generator list (by index) plus the lamp base point. */
struct SwsMeasure {
    std::vector<mpq_class> weight; // per generator, positive, sums to 1
    std::vector<double> cumulative;
    Point lamp_point;
};

/* inverse_of[i] names the generator index of gens[i]^{-1}; symmetry of the
   measure is validated against it */
SwsMeasure sws_measure(std::vector<mpq_class> weight, Point lamp_point,
                       const std::vector<int>& inverse_of);

struct SwsState {
    LampConfig lamps; // f_n
    Iet walker;       // g_n = h_n ... h_1
};

SwsState sws_initial(const AngleGroup& g);

/* one deterministic transition: switch at the base point (c1), translate
   the configuration by h and left-multiply the walker, switch again (c2) */
SwsState sws_apply(const SwsState& s, const SwsMeasure& m, bool c1, const Iet& h, bool c2);

// sample (c1, h, c2) from the measure and apply
SwsState sws_step(const SwsState& s, const SwsMeasure& m, const std::vector<Iet>& gens,
                  SplitMix64& rng);

} // namespace iet
