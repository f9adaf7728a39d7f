#include "iet/walks.hpp"

#include <algorithm>
#include <cmath>

namespace iet {

void finalize_walk_spec(WalkSpec& s) {
    if (s.weight.empty()) throw config_error("empty generator measure");
    mpq_class sum(0);
    for (const auto& w : s.weight) {
        if (w <= 0) throw config_error("generator weights must be positive");
        sum += w;
    }
    if (sum != 1) throw config_error("generator weights must sum to 1, got " + rational_str(sum));
    if (s.inverse_of.size() != s.weight.size())
        throw config_error("inverse table size does not match the measure");
    for (std::size_t i = 0; i < s.inverse_of.size(); ++i) {
        int j = s.inverse_of[i];
        if (j < 0 || static_cast<std::size_t>(j) >= s.weight.size() ||
            s.inverse_of[static_cast<std::size_t>(j)] != static_cast<int>(i))
            throw config_error("inverse table is not an involution");
        if (s.symmetric && s.weight[i] != s.weight[static_cast<std::size_t>(j)])
            throw config_error("measure declared symmetric but weights differ under inversion");
    }
    if (s.horizon < 1) throw config_error("horizon must be at least 1");
    if (s.trajectories < 1) throw config_error("need at least one trajectory");
    if (s.threads < 1) throw config_error("thread count must be positive");
    if (s.block_size < 1) throw config_error("block size must be positive");
    for (double e : s.epsilon_grid)
        if (!(e > 0.0 && e < 1.0)) throw config_error("epsilon grid values must lie in (0,1)");

    s.cumulative.clear();
    double acc = 0;
    for (const auto& w : s.weight) {
        acc += w.get_d();
        s.cumulative.push_back(acc);
    }
    s.cumulative.back() = 1.0;

    if (s.checkpoints.empty()) {
        for (long n = 1; n <= 8 && n <= s.horizon; ++n) s.checkpoints.push_back(n);
        long n = 8;
        while (n < s.horizon) {
            n = std::min(s.horizon, std::max(n + 1, n + n / 2));
            s.checkpoints.push_back(n);
        }
    }
    std::sort(s.checkpoints.begin(), s.checkpoints.end());
    s.checkpoints.erase(std::unique(s.checkpoints.begin(), s.checkpoints.end()),
                        s.checkpoints.end());
    if (s.checkpoints.front() < 1 || s.checkpoints.back() > s.horizon)
        throw config_error("checkpoints must lie in [1, horizon]");
}

void OrbitPartial::merge(const OrbitPartial& o) {
    if (o.count == 0) return;
    if (count == 0 && size_stats.empty()) init(o.size_stats.size(), o.eps_lt.empty() ? 0 : o.eps_lt[0].size());
    for (std::size_t c = 0; c < size_stats.size(); ++c) {
        size_stats[c].merge(o.size_stats[c]);
        ratio_stats[c].merge(o.ratio_stats[c]);
        log_half_pow[c].merge(o.log_half_pow[c]);
        t_gt[c] += o.t_gt[c];
        for (std::size_t e = 0; e < eps_lt[c].size(); ++e) eps_lt[c][e] += o.eps_lt[c][e];
    }
    paired_increment.merge(o.paired_increment);
    censored += o.censored;
    count += o.count;
}

OrbitEstimates finish_orbit_estimates(const OrbitPartial& agg, const WalkSpec& spec) {
    OrbitEstimates out;
    out.epsilon_grid = spec.epsilon_grid;
    out.horizon = spec.horizon;
    out.trajectories = agg.count;
    out.seed = spec.seed;
    for (std::size_t c = 0; c < spec.checkpoints.size(); ++c) {
        OrbitSeriesRow r;
        r.n = spec.checkpoints[c];
        r.mean_size = agg.size_stats[c].mean();
        r.size_stderr = agg.size_stats[c].stderr_mean();
        r.mean_ratio = agg.ratio_stats[c].mean();
        r.ratio_stderr = agg.ratio_stats[c].stderr_mean();
        r.rate = -agg.log_half_pow[c].log_mean(agg.count) / static_cast<double>(r.n);
        r.p_t_gt = static_cast<double>(agg.t_gt[c]) / static_cast<double>(agg.count);
        r.p_t_gt_stderr = proportion_stderr(r.p_t_gt, agg.count);
        for (std::size_t e = 0; e < spec.epsilon_grid.size(); ++e) {
            r.eps_probs.push_back(static_cast<double>(agg.eps_lt[c][e]) /
                                  static_cast<double>(agg.count));
            r.eps_thresholds.push_back(
                std::exp(-spec.epsilon_grid[e] * static_cast<double>(r.n)));
        }
        out.rows.push_back(std::move(r));
    }
    out.escape_censored = static_cast<double>(agg.censored) / static_cast<double>(agg.count);
    out.escape_censored_stderr = proportion_stderr(out.escape_censored, agg.count);
    out.escape_slope = agg.paired_increment.mean();
    out.escape_slope_stderr = agg.paired_increment.stderr_mean();
    return out;
}

namespace {

struct TauPartial {
    std::vector<MeanVar> stabilized; // per checkpoint, fraction of points
    std::vector<MeanVar> changes;    // per checkpoint, mean change events per point
    long long count = 0;

    void merge(const TauPartial& o) {
        if (o.count == 0) return;
        if (count == 0 && stabilized.empty()) {
            stabilized.resize(o.stabilized.size());
            changes.resize(o.changes.size());
        }
        for (std::size_t c = 0; c < stabilized.size(); ++c) {
            stabilized[c].merge(o.stabilized[c]);
            changes[c].merge(o.changes[c]);
        }
        count += o.count;
    }
};

} // namespace

TauProbeReport tau_infinity_probe(const std::vector<Iet>& gens, const WalkSpec& spec,
                                  const std::vector<Point>& samples) {
    if (gens.empty() || gens.size() != spec.weight.size())
        throw config_error("generator list does not match the measure");
    if (samples.empty()) throw config_error("no sample points given");
    if (spec.cumulative.empty()) throw config_error("walk spec not finalized");

    using PointSet = std::unordered_set<Point, PointHash, PointEq>;
    std::vector<Iet> inv;
    std::vector<PointSet> supp;
    for (const auto& g : gens) {
        inv.push_back(inverse(g));
        FinSuppPerm tau = cocycle(g); // keep alive: pairs() refers into it
        PointSet s;
        for (const auto& [x, y] : tau.pairs()) s.insert(x);
        supp.push_back(std::move(s));
    }

    const std::size_t J = samples.size();
    TauPartial agg = run_blocks<TauPartial>(
        spec.trajectories, spec.threads, spec.block_size,
        [&](long long traj, TauPartial& part) {
            if (part.count == 0 && part.stabilized.empty()) {
                part.stabilized.resize(spec.checkpoints.size());
                part.changes.resize(spec.checkpoints.size());
            }
            SplitMix64 rng = stream_for(spec.seed, static_cast<std::uint64_t>(traj));
            std::vector<Point> z = samples; // z_j = g_n^{-1} x_j along the right walk
            std::vector<long> last_change(J, 0);
            std::vector<long> n_changes(J, 0);
            std::size_t c = 0;
            for (long n = 1; n <= spec.horizon; ++n) {
                int i = sample_generator(spec, rng);
                for (std::size_t j = 0; j < J; ++j) {
                    if (supp[static_cast<std::size_t>(i)].count(z[j])) {
                        last_change[j] = n;
                        ++n_changes[j];
                    }
                    z[j] = evaluate(inv[static_cast<std::size_t>(i)], z[j]);
                }
                if (c < spec.checkpoints.size() && spec.checkpoints[c] == n) {
                    double total = 0;
                    for (std::size_t j = 0; j < J; ++j) total += static_cast<double>(n_changes[j]);
                    part.changes[c].add(total / static_cast<double>(J));
                    ++c;
                }
            }
            for (std::size_t cc = 0; cc < spec.checkpoints.size(); ++cc) {
                long n = spec.checkpoints[cc];
                long stable = 0;
                for (std::size_t j = 0; j < J; ++j)
                    if (last_change[j] <= n) ++stable;
                part.stabilized[cc].add(static_cast<double>(stable) / static_cast<double>(J));
            }
            ++part.count;
        });

    TauProbeReport out;
    out.horizon = spec.horizon;
    out.trajectories = agg.count;
    out.sample_points = J;
    for (std::size_t c = 0; c < spec.checkpoints.size(); ++c) {
        TauProbeRow r;
        r.n = spec.checkpoints[c];
        r.stabilized = agg.stabilized[c].mean();
        r.stabilized_stderr = agg.stabilized[c].stderr_mean();
        r.mean_changes = agg.changes[c].mean();
        out.rows.push_back(r);
    }
    return out;
}

namespace {

struct DriftPartial {
    std::vector<MeanVar> coord;
    long long count = 0;
    void merge(const DriftPartial& o) {
        if (o.count == 0) return;
        if (count == 0 && coord.empty()) coord.resize(o.coord.size());
        for (std::size_t i = 0; i < coord.size(); ++i) coord[i].merge(o.coord[i]);
        count += o.count;
    }
};

} // namespace

DriftReport drift_probe(const std::vector<Iet>& gens, const WalkSpec& spec, const Point& x0) {
    if (gens.empty() || gens.size() != spec.weight.size())
        throw config_error("generator list does not match the measure");
    if (spec.cumulative.empty()) throw config_error("walk spec not finalized");
    const int d = x0.group->d();

    DriftPartial agg = run_blocks<DriftPartial>(
        spec.trajectories, spec.threads, spec.block_size,
        [&](long long traj, DriftPartial& part) {
            if (part.count == 0 && part.coord.empty())
                part.coord.resize(static_cast<std::size_t>(d));
            SplitMix64 rng = stream_for(spec.seed, static_cast<std::uint64_t>(traj));
            Point y = x0;
            for (long n = 1; n <= spec.horizon; ++n) {
                int i = sample_generator(spec, rng);
                y = evaluate(gens[static_cast<std::size_t>(i)], y);
            }
            for (int i = 0; i < d; ++i)
                part.coord[static_cast<std::size_t>(i)].add(
                    static_cast<double>(y.k[static_cast<std::size_t>(i)] -
                                        x0.k[static_cast<std::size_t>(i)]) /
                    static_cast<double>(spec.horizon));
            ++part.count;
        });

    DriftReport out;
    out.horizon = spec.horizon;
    out.trajectories = agg.count;
    for (int i = 0; i < d; ++i) {
        out.mean.push_back(agg.coord[static_cast<std::size_t>(i)].mean());
        out.se.push_back(agg.coord[static_cast<std::size_t>(i)].stderr_mean());
    }
    return out;
}

} // namespace iet
