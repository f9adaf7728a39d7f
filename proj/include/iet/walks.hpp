#pragma once
#include "iet/actions.hpp"
#include "iet/errors.hpp"
#include "iet/parallel.hpp"
#include "iet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

namespace iet {

/* A sampling plan: a finitely supported measure on an indexed generator
   list, base data for the walk, horizon, trajectory budget and seed.
   Checkpoints are the n values at which estimates are recorded. */
struct WalkSpec {
    std::vector<mpq_class> weight;
    std::vector<int> inverse_of; // involution on generator indices
    bool symmetric = true;
    long horizon = 0;
    long long trajectories = 0;
    std::uint64_t seed = 0;
    std::vector<double> epsilon_grid = {0.01, 0.05, 0.10};
    std::vector<long> checkpoints; // filled with a default ladder when empty
    int threads = 1;
    long long block_size = 64;

    // built by finalize_walk_spec
    std::vector<double> cumulative;
};

/* validates weights/symmetry, builds the sampling table and the default
   checkpoint ladder (1..8, then 3/4-decade steps, always ending at the
   horizon) */
void finalize_walk_spec(WalkSpec& s);

inline int sample_generator(const WalkSpec& s, SplitMix64& rng) {
    double r = rng.real();
    int last = static_cast<int>(s.cumulative.size()) - 1;
    for (int i = 0; i < last; ++i)
        if (r < s.cumulative[static_cast<std::size_t>(i)]) return i;
    return last;
}

struct InvertedOrbitSample {
    std::vector<int> sizes; // sizes[k-1] = |O_k| for k = 1..horizon
    long return_time = -1;  // first k >= 1 with the walk back at x0; -1 = censored
};

/* One trajectory of inverted-orbit sizes plus the return time of the orbit
   walk.  For translation-like actions the inverted point g_k^{-1} x0 updates
   in O(1); otherwise the equidistributed set law
   O'_{k} = {x0} ∪ h_k · O'_{k-1} is maintained by translating the whole
   set (O(n^2) total, the accepted contract). */
template <class A>
InvertedOrbitSample sample_inverted_orbit(const A& act, const WalkSpec& spec, SplitMix64& rng) {
    using Key = typename A::Key;
    std::unordered_set<Key, typename A::KeyHash, typename A::KeyEq> seen;
    InvertedOrbitSample out;
    out.sizes.resize(static_cast<std::size_t>(spec.horizon));

    typename A::Pt x0 = act.base();
    typename A::Pt y = x0; // orbit walk position g_k x0 = h_k(previous)
    Key base_key = act.key(x0);
    typename A::KeyEq key_eq{};
    seen.insert(base_key);

    if constexpr (A::abelian) {
        typename A::Pt z = x0;
        for (long k = 1; k <= spec.horizon; ++k) {
            int i = sample_generator(spec, rng);
            z = act.apply_inverse(i, z);
            seen.insert(act.key(z));
            out.sizes[static_cast<std::size_t>(k - 1)] = static_cast<int>(seen.size());
            y = act.apply(i, y);
            if (out.return_time < 0 && key_eq(act.key(y), base_key)) out.return_time = k;
        }
    } else {
        std::vector<typename A::Pt> pts = {x0};
        for (long k = 1; k <= spec.horizon; ++k) {
            int i = sample_generator(spec, rng);
            for (auto& p : pts) p = act.apply(i, p); // injective: stays duplicate-free
            seen.clear();
            for (const auto& p : pts) seen.insert(act.key(p));
            if (seen.insert(base_key).second) pts.push_back(x0);
            out.sizes[static_cast<std::size_t>(k - 1)] = static_cast<int>(pts.size());
            y = act.apply(i, y);
            if (out.return_time < 0 && key_eq(act.key(y), base_key)) out.return_time = k;
        }
    }
    return out;
}

/* Reference route: |O_k| computed from the definition, replaying the stored
   word to evaluate each inverse prefix product.  O(n^2) map applications. */
template <class A>
InvertedOrbitSample sample_inverted_orbit_direct(const A& act, const WalkSpec& spec,
                                                 SplitMix64& rng) {
    using Key = typename A::Key;
    std::unordered_set<Key, typename A::KeyHash, typename A::KeyEq> seen;
    InvertedOrbitSample out;
    out.sizes.resize(static_cast<std::size_t>(spec.horizon));

    typename A::Pt x0 = act.base();
    typename A::Pt y = x0;
    Key base_key = act.key(x0);
    typename A::KeyEq key_eq{};
    seen.insert(base_key);
    std::vector<int> word;
    word.reserve(static_cast<std::size_t>(spec.horizon));

    for (long k = 1; k <= spec.horizon; ++k) {
        int i = sample_generator(spec, rng);
        word.push_back(i);
        // z = h_1^{-1} h_2^{-1} ... h_k^{-1} x0, innermost first
        typename A::Pt z = x0;
        for (long j = k - 1; j >= 0; --j) z = act.apply_inverse(word[static_cast<std::size_t>(j)], z);
        seen.insert(act.key(z));
        out.sizes[static_cast<std::size_t>(k - 1)] = static_cast<int>(seen.size());
        y = act.apply(i, y);
        if (out.return_time < 0 && key_eq(act.key(y), base_key)) out.return_time = k;
    }
    return out;
}

/* Per-checkpoint aggregates across trajectories; a commutative payload
   merged in fixed block order. */
struct OrbitPartial {
    std::vector<MeanVar> size_stats;   // |O_n|
    std::vector<MeanVar> ratio_stats;  // |O_n| / n
    std::vector<LogSum> log_half_pow;  // 2^{-|O_n|}
    std::vector<long long> t_gt;       // trajectories with T > n
    std::vector<std::vector<long long>> eps_lt; // [checkpoint][epsilon]
    MeanVar paired_increment; // (|O_h| - |O_{h/2}|) / (h - h/2)
    long long censored = 0;
    long long count = 0;

    void init(std::size_t ckpts, std::size_t eps) {
        size_stats.resize(ckpts);
        ratio_stats.resize(ckpts);
        log_half_pow.resize(ckpts);
        t_gt.assign(ckpts, 0);
        eps_lt.assign(ckpts, std::vector<long long>(eps, 0));
    }
    void merge(const OrbitPartial& o);
};

struct OrbitSeriesRow {
    long n = 0;
    double mean_size = 0, size_stderr = 0;
    double mean_ratio = 0, ratio_stderr = 0;
    double rate = 0;        // -(1/n) log mean(2^{-|O_n|})
    double p_t_gt = 0, p_t_gt_stderr = 0;
    std::vector<double> eps_probs;      // P(|O_n| < eps n)
    std::vector<double> eps_thresholds; // e^{-eps n}
};

struct OrbitEstimates {
    std::vector<OrbitSeriesRow> rows;
    std::vector<double> epsilon_grid;
    long horizon = 0;
    long long trajectories = 0;
    std::uint64_t seed = 0;
    // escape probability P(T = infinity), bracketed two ways
    double escape_censored = 0, escape_censored_stderr = 0;
    double escape_slope = 0, escape_slope_stderr = 0;
};

OrbitEstimates finish_orbit_estimates(const OrbitPartial& agg, const WalkSpec& spec);

template <class A>
OrbitEstimates estimate_prop41(const A& act, const WalkSpec& spec) {
    if (spec.trajectories < 100) throw config_error("need at least 100 trajectories");
    std::vector<int> mask(static_cast<std::size_t>(spec.horizon) + 1, -1);
    for (std::size_t c = 0; c < spec.checkpoints.size(); ++c)
        mask[static_cast<std::size_t>(spec.checkpoints[c])] = static_cast<int>(c);
    const long h = spec.horizon, h2 = h / 2;

    OrbitPartial agg = run_blocks<OrbitPartial>(
        spec.trajectories, spec.threads, spec.block_size,
        [&](long long traj, OrbitPartial& part) {
            if (part.count == 0 && part.size_stats.empty())
                part.init(spec.checkpoints.size(), spec.epsilon_grid.size());
            SplitMix64 rng = stream_for(spec.seed, static_cast<std::uint64_t>(traj));
            InvertedOrbitSample s = sample_inverted_orbit(act, spec, rng);
            long t_eff = s.return_time < 0 ? h + 1 : s.return_time;
            for (std::size_t c = 0; c < spec.checkpoints.size(); ++c) {
                long n = spec.checkpoints[c];
                int sz = s.sizes[static_cast<std::size_t>(n - 1)];
                part.size_stats[c].add(sz);
                part.ratio_stats[c].add(static_cast<double>(sz) / static_cast<double>(n));
                part.log_half_pow[c].add(-static_cast<double>(sz) * std::log(2.0));
                if (t_eff > n) ++part.t_gt[c];
                for (std::size_t e = 0; e < spec.epsilon_grid.size(); ++e)
                    if (sz < spec.epsilon_grid[e] * static_cast<double>(n)) ++part.eps_lt[c][e];
            }
            if (h2 >= 1)
                part.paired_increment.add(
                    static_cast<double>(s.sizes[static_cast<std::size_t>(h - 1)] -
                                        s.sizes[static_cast<std::size_t>(h2 - 1)]) /
                    static_cast<double>(h - h2));
            if (s.return_time < 0) ++part.censored;
            ++part.count;
        });
    return finish_orbit_estimates(agg, spec);
}

struct RecurrenceReport {
    double escape_censored = 0, escape_censored_stderr = 0;
    double escape_slope = 0, escape_slope_stderr = 0;
    long horizon = 0;
    long long trajectories = 0;
};

template <class A>
RecurrenceReport estimate_recurrence(const A& act, const WalkSpec& spec) {
    if (!spec.symmetric) throw config_error("recurrence estimate requires a symmetric measure");
    OrbitEstimates e = estimate_prop41(act, spec);
    return {e.escape_censored, e.escape_censored_stderr, e.escape_slope, e.escape_slope_stderr,
            e.horizon, e.trajectories};
}

/* Monte Carlo of the switch-walk-switch configuration chain itself (no
   composed group elements; the configuration translates by each sampled
   generator).  Returns, per checkpoint, the frequency of f_n = 0. */
struct SwsFreqRow {
    long n = 0;
    double p_empty = 0, p_empty_stderr = 0;
};
struct SwsFreqPartial {
    std::vector<long long> empties;
    long long count = 0;
    void merge(const SwsFreqPartial& o) {
        if (empties.empty()) empties.assign(o.empties.size(), 0);
        if (!o.empties.empty())
            for (std::size_t i = 0; i < empties.size(); ++i) empties[i] += o.empties[i];
        count += o.count;
    }
};

template <class A>
std::vector<SwsFreqRow> estimate_sws_return(const A& act, const WalkSpec& spec) {
    using Key = typename A::Key;
    std::vector<int> mask(static_cast<std::size_t>(spec.horizon) + 1, -1);
    for (std::size_t c = 0; c < spec.checkpoints.size(); ++c)
        mask[static_cast<std::size_t>(spec.checkpoints[c])] = static_cast<int>(c);

    SwsFreqPartial agg = run_blocks<SwsFreqPartial>(
        spec.trajectories, spec.threads, spec.block_size,
        [&](long long traj, SwsFreqPartial& part) {
            if (part.count == 0 && part.empties.empty())
                part.empties.assign(spec.checkpoints.size(), 0);
            SplitMix64 rng = stream_for(spec.seed, static_cast<std::uint64_t>(traj));
            typename A::Pt x0 = act.base();
            Key base_key = act.key(x0);
            typename A::KeyEq key_eq{};
            // lit lamps; Pt kept to translate, Key for membership
            std::vector<typename A::Pt> lit;
            auto toggle = [&](bool coin) {
                if (!coin) return;
                for (std::size_t j = 0; j < lit.size(); ++j)
                    if (key_eq(act.key(lit[j]), base_key)) {
                        lit[j] = lit.back();
                        lit.pop_back();
                        return;
                    }
                lit.push_back(x0);
            };
            for (long k = 1; k <= spec.horizon; ++k) {
                toggle(rng.below(2) != 0);
                int i = sample_generator(spec, rng);
                for (auto& p : lit) p = act.apply(i, p);
                toggle(rng.below(2) != 0);
                int c = mask[static_cast<std::size_t>(k)];
                if (c >= 0 && lit.empty()) ++part.empties[static_cast<std::size_t>(c)];
            }
            ++part.count;
        });

    std::vector<SwsFreqRow> rows;
    for (std::size_t c = 0; c < spec.checkpoints.size(); ++c) {
        SwsFreqRow r;
        r.n = spec.checkpoints[c];
        r.p_empty = static_cast<double>(agg.empties[c]) / static_cast<double>(agg.count);
        r.p_empty_stderr = proportion_stderr(r.p_empty, agg.count);
        rows.push_back(r);
    }
    return rows;
}

/* Exact enumeration of all length-n words with rational weights, tracking
   the inverted-orbit set through the equidistributed O' recursion. */
struct OrbitOracleResult {
    std::vector<mpq_class> mean_half_pow; // E 2^{-|O_k|}, k = 0..n
    std::map<int, mpq_class> size_dist;   // distribution of |O_n|
};

template <class A>
OrbitOracleResult exact_orbit_oracle(const A& act, const std::vector<mpq_class>& weight, int n,
                                     long long budget = 10'000'000) {
    double words = 1;
    for (int k = 0; k < n; ++k) {
        words *= static_cast<double>(weight.size());
        if (words > static_cast<double>(budget))
            throw budget_error("word enumeration exceeds the configured budget");
    }
    OrbitOracleResult out;
    out.mean_half_pow.assign(static_cast<std::size_t>(n) + 1, mpq_class(0));

    auto half_pow = [](int s) {
        return mpq_class(mpz_class(1), mpz_class(1) << s);
    };

    struct Frame {
        std::vector<typename A::Pt> pts;
        mpq_class prob;
        int depth;
    };
    std::vector<Frame> stack;
    stack.push_back({{act.base()}, mpq_class(1), 0});
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        int sz = static_cast<int>(f.pts.size());
        out.mean_half_pow[static_cast<std::size_t>(f.depth)] += f.prob * half_pow(sz);
        if (f.depth == n) {
            out.size_dist[sz] += f.prob;
            continue;
        }
        for (std::size_t i = 0; i < weight.size(); ++i) {
            Frame child;
            child.depth = f.depth + 1;
            child.prob = f.prob * weight[i];
            child.pts.reserve(f.pts.size() + 1);
            for (const auto& p : f.pts) child.pts.push_back(act.apply(static_cast<int>(i), p));
            bool has_base = false;
            auto base_key = act.key(act.base());
            typename A::KeyEq eq;
            for (const auto& p : child.pts)
                if (eq(act.key(p), base_key)) has_base = true;
            if (!has_base) child.pts.push_back(act.base());
            stack.push_back(std::move(child));
        }
    }
    return out;
}

/* Exact switch-walk-switch return probabilities P(f_k = 0), k = 0..n,
   via dynamic programming over lamp configurations (the configuration
   process is Markov on its own: toggle at the base point, translate by the
   sampled generator, toggle again). */
template <class A>
std::vector<mpq_class> exact_sws_return(const A& act, const std::vector<mpq_class>& weight,
                                        int n, long long budget = 10'000'000) {
    using Key = typename A::Key;
    using Config = std::vector<Key>; // sorted by key_less
    struct ConfigLess {
        const A* a;
        bool operator()(const Config& x, const Config& y) const {
            return std::lexicographical_compare(
                x.begin(), x.end(), y.begin(), y.end(),
                [&](const Key& u, const Key& v) { return a->key_less(u, v); });
        }
    };
    using Dp = std::map<Config, std::pair<mpq_class, std::vector<typename A::Pt>>, ConfigLess>;
    Dp cur{ConfigLess{&act}};
    Key base_key = act.key(act.base());
    cur[{}] = {mpq_class(1), {}};

    std::vector<mpq_class> out;
    out.push_back(mpq_class(1));

    auto toggled = [&](std::vector<typename A::Pt> pts) {
        typename A::KeyEq eq;
        for (std::size_t j = 0; j < pts.size(); ++j)
            if (eq(act.key(pts[j]), base_key)) {
                pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(j));
                return pts;
            }
        pts.push_back(act.base());
        return pts;
    };
    auto canonical = [&](std::vector<typename A::Pt> pts) {
        std::sort(pts.begin(), pts.end(), [&](const auto& a, const auto& b) {
            return act.key_less(act.key(a), act.key(b));
        });
        return pts;
    };

    for (int step = 1; step <= n; ++step) {
        if (static_cast<long long>(cur.size()) * static_cast<long long>(weight.size()) * 4 >
            budget)
            throw budget_error("configuration space exceeds the configured budget");
        Dp next{ConfigLess{&act}};
        for (const auto& [cfg_key, entry] : cur) {
            const auto& [prob, pts] = entry;
            for (int c1 = 0; c1 < 2; ++c1) {
                std::vector<typename A::Pt> p1 = c1 ? toggled(pts) : pts;
                for (std::size_t i = 0; i < weight.size(); ++i) {
                    std::vector<typename A::Pt> p2 = p1;
                    for (auto& p : p2) p = act.apply(static_cast<int>(i), p);
                    for (int c2 = 0; c2 < 2; ++c2) {
                        std::vector<typename A::Pt> p3 = c2 ? toggled(p2) : p2;
                        p3 = canonical(std::move(p3));
                        Config key;
                        key.reserve(p3.size());
                        for (const auto& p : p3) key.push_back(act.key(p));
                        mpq_class w = prob * weight[i] / 4;
                        auto it = next.find(key);
                        if (it == next.end())
                            next.emplace(std::move(key), std::make_pair(w, std::move(p3)));
                        else
                            it->second.first += w;
                    }
                }
            }
        }
        cur = std::move(next);
        auto it = cur.find(Config{});
        out.push_back(it == cur.end() ? mpq_class(0) : it->second.first);
    }
    return out;
}

/* Boundary stabilization probe: along the right walk g_n = g_{n-1} h_n the
   permutation tau_{g_n} changes its value at x exactly when
   g_{n-1}^{-1} x lies in the support of tau_{h_n}; that preimage updates
   in O(1) per step, so no composed elements are ever formed. */
struct TauProbeRow {
    long n = 0;
    double stabilized = 0, stabilized_stderr = 0; // fraction of points with no
                                                  // change after n
    double mean_changes = 0;                      // change events per point up to n
};
struct TauProbeReport {
    std::vector<TauProbeRow> rows;
    long horizon = 0;
    long long trajectories = 0;
    std::size_t sample_points = 0;
};

TauProbeReport tau_infinity_probe(const std::vector<Iet>& gens, const WalkSpec& spec,
                                  const std::vector<Point>& samples);

/* Mean of the free coordinates of (g_n x0 - x0)/n over trajectories. */
struct DriftReport {
    std::vector<double> mean, se; // per free coordinate
    long horizon = 0;
    long long trajectories = 0;
};

DriftReport drift_probe(const std::vector<Iet>& gens, const WalkSpec& spec, const Point& x0);

} // namespace iet
