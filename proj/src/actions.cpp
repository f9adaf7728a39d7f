#include "iet/actions.hpp"
#include "iet/errors.hpp"

namespace iet {

LatticeAction::LatticeAction(long m, int d, std::vector<Pt> moves, long horizon)
    : m_(m), d_(d), moves_(std::move(moves)) {
    if (m_ < 1) throw config_error("torsion order must be >= 1");
    if (d_ < 0 || d_ > 3) throw config_error("lattice rank must be between 0 and 3");
    long long max_step = 1;
    for (const Pt& mv : moves_)
        for (int i = 1; i <= d_; ++i)
            max_step = std::max(max_step, std::llabs(mv[static_cast<std::size_t>(i)]));

    /* pick a signed coordinate width that the walk cannot overflow, then
       check the whole state still packs into 64 bits */
    long long reach = (horizon + 1) * max_step + 1;
    coord_bits_ = 1;
    while ((1LL << coord_bits_) <= 2 * reach && coord_bits_ < 62) ++coord_bits_;
    long torsion_bits = 1;
    while ((1L << torsion_bits) < m_ && torsion_bits < 62) ++torsion_bits;
    if (coord_bits_ * d_ + torsion_bits > 63)
        throw config_error("lattice key does not fit in 64 bits for this horizon");
}

LatticeAction::Pt LatticeAction::step(const Pt& x, const Pt& mv, long long sgn) const {
    Pt y;
    y[0] = (x[0] + sgn * mv[0]) % m_;
    if (y[0] < 0) y[0] += m_;
    for (int i = 1; i <= d_; ++i)
        y[static_cast<std::size_t>(i)] =
            x[static_cast<std::size_t>(i)] + sgn * mv[static_cast<std::size_t>(i)];
    for (int i = d_ + 1; i < 4; ++i) y[static_cast<std::size_t>(i)] = 0;
    return y;
}

LatticeAction::Key LatticeAction::key(const Pt& x) const {
    std::uint64_t k = static_cast<std::uint64_t>(x[0]);
    const std::uint64_t half = 1ULL << (coord_bits_ - 1);
    for (int i = 1; i <= d_; ++i) {
        std::uint64_t c = static_cast<std::uint64_t>(x[static_cast<std::size_t>(i)] +
                                                     static_cast<long long>(half));
        k = (k << coord_bits_) | (c & ((1ULL << coord_bits_) - 1));
    }
    return k;
}

IetAction::IetAction(std::vector<Iet> gens, Point base) : gens_(std::move(gens)), base_(base) {
    if (gens_.empty()) throw config_error("empty generator list");
    for (const Iet& g : gens_) {
        if (&g.group() != base_.group) throw config_error("generator and base point group mismatch");
        inv_.push_back(inverse(g));
    }
}

} // namespace iet
