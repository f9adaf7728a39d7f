#include "iet/wreath.hpp"
#include "iet/errors.hpp"

#include <algorithm>
#include <sstream>

namespace iet {

LampConfig lamp_make(const std::vector<Point>& pts) {
    LampConfig c;
    for (const Point& p : pts) c.lit.insert(p);
    return c;
}

LampConfig lamp_xor(const LampConfig& a, const LampConfig& b) {
    LampConfig out = a;
    for (const Point& p : b.lit) {
        auto [it, inserted] = out.lit.insert(p);
        if (!inserted) out.lit.erase(it);
    }
    return out;
}

LampConfig lamp_translate(const Iet& g, const LampConfig& a) {
    LampConfig out;
    for (const Point& p : a.lit) out.lit.insert(evaluate(g, p));
    return out;
}

bool lamp_lit(const LampConfig& a, const Point& x) { return a.lit.count(x) > 0; }

bool lamp_equal(const LampConfig& a, const LampConfig& b) {
    if (a.lit.size() != b.lit.size()) return false;
    for (const Point& p : a.lit)
        if (!b.lit.count(p)) return false;
    return true;
}

std::vector<Point> support_map(const LampConfig& a) {
    std::vector<Point> pts(a.lit.begin(), a.lit.end());
    std::sort(pts.begin(), pts.end(),
              [](const Point& p, const Point& q) { return point_compare(p, q) < 0; });
    return pts;
}

std::string lamp_str(const LampConfig& a) {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const Point& p : support_map(a)) {
        if (!first) os << ", ";
        first = false;
        os << point_str(p);
    }
    os << "}";
    return os.str();
}

SwsMeasure sws_measure(std::vector<mpq_class> weight, Point lamp_point,
                       const std::vector<int>& inverse_of) {
    if (weight.empty()) throw config_error("empty generator measure");
    if (inverse_of.size() != weight.size())
        throw config_error("inverse table size does not match the measure");
    mpq_class total(0);
    for (std::size_t i = 0; i < weight.size(); ++i) {
        if (weight[i] <= 0) throw config_error("measure weights must be positive");
        int j = inverse_of[i];
        if (j < 0 || j >= static_cast<int>(weight.size()) ||
            inverse_of[static_cast<std::size_t>(j)] != static_cast<int>(i))
            throw config_error("inverse table is not an involution");
        if (weight[i] != weight[static_cast<std::size_t>(j)])
            throw config_error("measure is not symmetric under inversion");
        total += weight[i];
    }
    if (total != 1) throw config_error("measure weights must sum to 1");

    SwsMeasure m;
    m.weight = std::move(weight);
    m.cumulative.resize(m.weight.size());
    mpq_class run(0);
    for (std::size_t i = 0; i < m.weight.size(); ++i) {
        run += m.weight[i];
        m.cumulative[i] = run.get_d();
    }
    m.cumulative.back() = 1.0; // guard against rounding at the top
    m.lamp_point = std::move(lamp_point);
    return m;
}

SwsState sws_initial(const AngleGroup& g) { return {LampConfig{}, Iet::identity(g)}; }

SwsState sws_apply(const SwsState& s, const SwsMeasure& m, bool c1, const Iet& h, bool c2) {
    LampConfig toggle = lamp_make({m.lamp_point});
    LampConfig f = s.lamps;
    if (c1) f = lamp_xor(f, toggle);
    f = lamp_translate(h, f);
    if (c2) f = lamp_xor(f, toggle);
    return {std::move(f), compose(h, s.walker)};
}

SwsState sws_step(const SwsState& s, const SwsMeasure& m, const std::vector<Iet>& gens,
                  SplitMix64& rng) {
    if (gens.size() != m.weight.size())
        throw config_error("generator list does not match the measure");
    bool c1 = rng.below(2) != 0;
    double r = rng.real();
    std::size_t pick = m.cumulative.size() - 1;
    for (std::size_t i = 0; i < m.cumulative.size(); ++i)
        if (r < m.cumulative[i]) {
            pick = i;
            break;
        }
    bool c2 = rng.below(2) != 0;
    return sws_apply(s, m, c1, gens[pick], c2);
}

} // namespace iet
