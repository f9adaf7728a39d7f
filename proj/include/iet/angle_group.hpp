#pragma once
#include "iet/enclosure.hpp"
#include "iet/errors.hpp"

#include <boost/container/small_vector.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace iet {

/* Free coordinates of a circle element over the angle lattice; d is small
   (experiments use d <= 3) but not bounded by the type. */
using coord_vec = boost::container::small_vector<long long, 4>;

/* Precision ladder for certified comparisons: refine until separated, then
   give up loudly.  Everything that orders circle points goes through this. */
inline constexpr long kPrecisionLadder[] = {64, 128, 256, 1024};

/* The angle lattice Lambda = (1/m)Z/Z x Z^d together with the base points
   Sigma.  theta_1..theta_d are declared rationally independent from 1 and
   from each other; base points are declared to lie in pairwise distinct
   Lambda-cosets.  Neither declaration can be proven from enclosures, so
   violations surface as undecidable_error when the ladder runs out.

   Circle elements are stored as exact integer data (torsion p in [0,m),
   free coordinates k, base index); real arithmetic only ever DECIDES
   ORDER, never feeds back into the stored coordinates. */
class AngleGroup {
public:
    AngleGroup(long m, std::vector<RealEnclosure> theta, std::vector<RealEnclosure> sigma);

    long m() const { return m_; }
    int d() const { return static_cast<int>(theta_.size()); }
    int base_count() const { return static_cast<int>(sigma_.size()); }

    const RealEnclosure& theta(int i) const { return theta_[i]; }
    const RealEnclosure& sigma(int b) const { return sigma_[b]; }

    double theta_approx(int i) const { return theta_[i].approx(); }
    double theta_err(int i) const { return theta_[i].approx_err(); }
    // base point representative in [0,1), approx and rigorous error
    double sigma_rep_approx(int b) const { return sigma_rep_[b]; }
    double sigma_rep_err(int b) const { return sigma_err_[b]; }

private:
    long m_;
    std::vector<RealEnclosure> theta_;
    std::vector<RealEnclosure> sigma_;
    std::vector<double> sigma_rep_, sigma_err_;
};

struct Angle {
    const AngleGroup* group = nullptr;
    long long p = 0; // torsion coordinate, canonical in [0, m)
    coord_vec k;
};

Angle angle_zero(const AngleGroup& g);
Angle angle_make(const AngleGroup& g, long long p, coord_vec k);
Angle angle_add(const Angle& a, const Angle& b);
Angle angle_neg(const Angle& a);
bool angle_equal(const Angle& a, const Angle& b);
bool angle_is_zero(const Angle& a);
std::uint64_t angle_hash(const Angle& a);

// representative of the angle's value in [0,1): certified interval / approx
MpqInterval angle_real_enclosure(const Angle& a, long bits);
struct ApproxRep {
    double rep; // approximate representative in [0,1)
    double err; // rigorous bound on |rep - true representative|
};
ApproxRep angle_rep_approx(const Angle& a);

// canonical rendering "p/m + [k_1,...,k_d]·θ"; parse is its strict inverse
std::string angle_str(const Angle& a);
Angle angle_parse(const AngleGroup& g, std::string_view text);

/* A circle point sigma_b + angle.  approx/err cache the representative in
   [0,1) for the fast comparison path; they are maintained on translation
   and refreshed from exact enclosures whenever a mod-1 fold is uncertain
   or the accumulated error grows past a threshold. */
struct Point {
    const AngleGroup* group = nullptr;
    int base = 0;
    long long p = 0;
    coord_vec k;
    double approx = 0.0;
    double err = 0.0;
};

Point point_make(const AngleGroup& g, int base);
Point point_make(const AngleGroup& g, int base, const Angle& off);
Point point_translate(const Point& x, const Angle& a);
// hot-path variant: the angle's representative approx/err precomputed once
Point point_translate(const Point& x, const Angle& a, double rep, double rep_err);

bool point_equal(const Point& x, const Point& y);
std::uint64_t point_hash(const Point& x);

/* Total order on representatives in [0,1): -1, 0, +1.  Escalates through
   the precision ladder; throws undecidable_error (naming both points) if
   the top rung cannot separate coordinate-distinct points. */
int point_compare(const Point& x, const Point& y);

MpqInterval point_value_enclosure(const Point& x, long bits);

std::string point_str(const Point& x);
Point point_parse(const AngleGroup& g, std::string_view text);

Angle point_offset(const Point& x); // the (p, k) part as an Angle

struct PointHash {
    std::size_t operator()(const Point& x) const { return point_hash(x); }
};
struct PointEq {
    bool operator()(const Point& x, const Point& y) const { return point_equal(x, y); }
};

} // namespace iet
