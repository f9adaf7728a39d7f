#pragma once
#include "iet/angle_group.hpp"
#include "iet/rng.hpp"

#include <unordered_map>
#include <utility>
#include <vector>

namespace iet {

/* Right-continuous piecewise translation of the circle, stored canonically:
   cuts strictly increasing in [0,1), one translation angle per arc
   [cut_i, cut_{i+1}), cyclically adjacent arcs with equal translation
   merged.  A rotation keeps no cuts at all (one full-circle arc), so
   extensional equality reduces to coordinate equality of the stored data.
   Immutable after construction. */
class Iet {
public:
    static Iet identity(const AngleGroup& g);
    static Iet rotation(const AngleGroup& g, const Angle& a);
    /* general constructor: arc [cuts[i], cuts[i+1]) translates by shifts[i];
       validates that the images exactly tile the circle, sorts, merges */
    static Iet from_arcs(std::vector<Point> cuts, std::vector<Angle> shifts);

    const AngleGroup& group() const { return *group_; }
    int arc_count() const { return static_cast<int>(shifts_.size()); }
    bool is_rotation() const { return cuts_.empty(); }
    bool is_identity() const { return cuts_.empty() && angle_is_zero(shifts_[0]); }

    const std::vector<Point>& cuts() const { return cuts_; }
    const std::vector<Angle>& shifts() const { return shifts_; }
    const Point& cut(int i) const { return cuts_[i]; }
    const Angle& shift(int i) const { return shifts_[i]; }
    const ApproxRep& shift_rep(int i) const { return shift_reps_[i]; }

private:
    Iet() = default;
    void finalize(); // cache per-arc representative approximations

    const AngleGroup* group_ = nullptr;
    std::vector<Point> cuts_;        // empty for a rotation
    std::vector<Angle> shifts_;      // size max(1, cuts_.size())
    std::vector<ApproxRep> shift_reps_;
};

// index of the arc containing x (0 for a rotation)
int arc_index(const Iet& g, const Point& x);

Point evaluate(const Iet& g, const Point& x);
/* the left-continuous companion: agrees with g off the cuts; at a cut it
   takes the translation of the arc ending there */
Point companion_evaluate(const Iet& g, const Point& x);

Iet compose(const Iet& f, const Iet& g); // f after g
Iet inverse(const Iet& g);
bool iet_equal(const Iet& a, const Iet& b);

/* stable text form: "rot <angle>" or "<cut> => <shift> ; ..."; parses back
   bit-exactly */
std::string iet_str(const Iet& g);
Iet iet_parse(const AngleGroup& grp, std::string_view text);

/* Finitely supported permutation of circle points: only non-fixed pairs are
   stored, so the identity is the empty map. */
class FinSuppPerm {
public:
    using Map = std::unordered_map<Point, Point, PointHash, PointEq>;

    FinSuppPerm() = default;
    // validates bijectivity and domain = range; fixed points are dropped
    static FinSuppPerm from_pairs(const std::vector<std::pair<Point, Point>>& pairs);
    static FinSuppPerm from_cycle(const std::vector<Point>& cycle); // x0->x1->...->x0

    Point apply(const Point& x) const;
    bool is_identity() const { return map_.empty(); }
    std::size_t support_size() const { return map_.size(); }
    const Map& pairs() const { return map_; }

private:
    Map map_;
};

FinSuppPerm perm_multiply(const FinSuppPerm& a, const FinSuppPerm& b); // a after b
FinSuppPerm perm_inverse(const FinSuppPerm& a);
// g sigma g^{-1}, acting on points through the circle map g
FinSuppPerm perm_conjugate(const Iet& g, const FinSuppPerm& sigma);
bool perm_equal(const FinSuppPerm& a, const FinSuppPerm& b);

// non-fixed points in circle order
std::vector<Point> support_map(const FinSuppPerm& a);

/* tau_g: the finitely supported permutation recording how g's companion
   disagrees with g; support is exactly the discontinuity set of g^{-1}.
   Verified at runtime on the candidate cuts and on a pseudo-random sample
   of nearby points (which must all be fixed). */
FinSuppPerm cocycle(const Iet& g);

/* element (sigma, g) acting by x -> sigma(g x); multiplication twists the
   permutation part by conjugation with the circle map */
struct SemidirectElement {
    FinSuppPerm perm;
    Iet iet;
};

SemidirectElement semidirect_identity(const AngleGroup& g);
SemidirectElement semidirect_multiply(const SemidirectElement& u, const SemidirectElement& v);
SemidirectElement semidirect_inverse(const SemidirectElement& u);
bool semidirect_equal(const SemidirectElement& u, const SemidirectElement& v);
SemidirectElement twisted_embed(const Iet& g); // (cocycle(g), g)

// rank over Q of the free coordinates of all translation amounts
int rational_rank(const std::vector<Iet>& gens);

/* pseudo-random interval exchange with all cuts in one base coset: distinct
   cut angles are sampled, then the arcs are laid back end-to-end in a
   shuffled order (which guarantees a bijection) */
Iet random_iet(const AngleGroup& g, SplitMix64& rng, int arcs, int base = 0);

// fraction-free Gaussian elimination; exposed for direct testing
int integer_matrix_rank(std::vector<std::vector<mpz_class>> m);

} // namespace iet
