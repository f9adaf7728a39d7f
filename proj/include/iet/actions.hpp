#pragma once
#include "iet/iet.hpp"

#include <array>
#include <string>

namespace iet {

/* Walk actions share a duck-typed shape consumed by the templates in
   walks.hpp:

     using Pt      = ...;            point of the acted-on universe
     using Key     = ...;            hashable canonical form of Pt
     using KeyHash = ...; KeyEq = ...;
     static constexpr bool abelian;  translation-like (inverse prefix is
                                     incremental) or not
     int gen_count() const;
     Pt base() const;
     Pt apply(int i, const Pt&) const;          action of generator i
     Pt apply_inverse(int i, const Pt&) const;  action of its inverse
     Key key(const Pt&) const;
     bool key_less(const Key&, const Key&) const;  total order, for
                                                   canonical config sorting

   Everything is immutable and safe to share across threads. */

/* Translations of a single coset x0 + Λ, coordinates only: a point is
   (torsion p, free k), a generator is a coordinate increment.  Keys pack
   the whole state into 64 bits; ranges are validated by the constructor
   against the declared horizon. */
class LatticeAction {
public:
    using Pt = std::array<long long, 4>; // [p, k1, k2, k3]
    using Key = std::uint64_t;
    struct KeyHash {
        std::size_t operator()(Key k) const { return static_cast<std::size_t>(mix64(k)); }
    };
    using KeyEq = std::equal_to<Key>;
    static constexpr bool abelian = true;

    LatticeAction(long m, int d, std::vector<Pt> moves, long horizon);

    int gen_count() const { return static_cast<int>(moves_.size()); }
    Pt base() const { return Pt{0, 0, 0, 0}; }
    Pt apply(int i, const Pt& x) const { return step(x, moves_[static_cast<std::size_t>(i)], 1); }
    Pt apply_inverse(int i, const Pt& x) const {
        return step(x, moves_[static_cast<std::size_t>(i)], -1);
    }
    Key key(const Pt& x) const;
    bool key_less(Key a, Key b) const { return a < b; }

    long m() const { return m_; }
    int d() const { return d_; }

private:
    Pt step(const Pt& x, const Pt& mv, long long sgn) const;

    long m_;
    int d_;
    std::vector<Pt> moves_;
    int coord_bits_; // per free coordinate in the packed key
};

/* The full circle action of a generating list of interval exchanges. */
class IetAction {
public:
    using Pt = Point;
    using Key = Point;
    using KeyHash = PointHash;
    using KeyEq = PointEq;
    static constexpr bool abelian = false;

    IetAction(std::vector<Iet> gens, Point base);

    int gen_count() const { return static_cast<int>(gens_.size()); }
    const Pt& base() const { return base_; }
    Pt apply(int i, const Pt& x) const { return evaluate(gens_[static_cast<std::size_t>(i)], x); }
    Pt apply_inverse(int i, const Pt& x) const {
        return evaluate(inv_[static_cast<std::size_t>(i)], x);
    }
    const Key& key(const Pt& x) const { return x; }
    bool key_less(const Key& a, const Key& b) const { return point_compare(a, b) < 0; }

    const Iet& gen(int i) const { return gens_[static_cast<std::size_t>(i)]; }
    const Iet& gen_inverse(int i) const { return inv_[static_cast<std::size_t>(i)]; }

private:
    std::vector<Iet> gens_, inv_;
    Point base_;
};

/* Action on a one-point universe: every generator fixes the point. */
struct FixedPointAction {
    using Pt = int;
    using Key = int;
    using KeyHash = std::hash<int>;
    using KeyEq = std::equal_to<int>;
    static constexpr bool abelian = true;

    int gens = 1;

    int gen_count() const { return gens; }
    Pt base() const { return 0; }
    Pt apply(int, const Pt& x) const { return x; }
    Pt apply_inverse(int, const Pt& x) const { return x; }
    Key key(const Pt& x) const { return x; }
    bool key_less(Key a, Key b) const { return a < b; }
};

/* Free product of k copies of Z/2 acting on itself by left multiplication;
   a point is a reduced word over letters 'a'+i.  Left multiplication either
   cancels the leading letter or prepends one, so words are stored reversed
   to make both O(1). */
class FreeInvolutionAction {
public:
    using Pt = std::string; // reversed reduced word; base point is the empty word
    using Key = std::string;
    using KeyHash = std::hash<std::string>;
    using KeyEq = std::equal_to<std::string>;
    static constexpr bool abelian = false;

    explicit FreeInvolutionAction(int letters) : letters_(letters) {}

    int gen_count() const { return letters_; }
    Pt base() const { return {}; }
    Pt apply(int i, const Pt& x) const {
        char c = static_cast<char>('a' + i);
        Pt y = x;
        if (!y.empty() && y.back() == c)
            y.pop_back();
        else
            y.push_back(c);
        return y;
    }
    Pt apply_inverse(int i, const Pt& x) const { return apply(i, x); }
    Key key(const Pt& x) const { return x; }
    bool key_less(const Key& a, const Key& b) const { return a < b; }

private:
    int letters_;
};

} // namespace iet
