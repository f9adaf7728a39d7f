#include "iet/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "iet/actions.hpp"
#include "iet/colored_line.hpp"
#include "iet/records.hpp"
#include "iet/schreier.hpp"
#include "iet/walks.hpp"

namespace iet {

namespace {

std::string g17(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

std::string g6(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.6g", v);
    return b;
}

std::string pm(double v, double e) { return g6(v) + " ± " + g6(e); }

/* field as a double when present and numeric; absent encodes non-finite */
std::optional<double> num(const nlohmann::json& r, const char* k) {
    auto it = r.find(k);
    if (it == r.end() || !it->is_number()) return std::nullopt;
    return it->get<double>();
}

std::string num_str(const nlohmann::json& r, const char* k) {
    auto v = num(r, k);
    return v ? g6(*v) : "inf";
}

/* walk generators in measure order, with the inverse pairing recovered by
   exact comparison; every sampling measure must be closed under inverses */
struct WalkSetup {
    std::vector<Iet> gens;
    std::vector<std::string> names;
    WalkSpec spec;
};

WalkSetup make_walk_setup(const ExperimentConfig& cfg, int threads) {
    WalkSetup w;
    for (std::size_t i = 0; i < cfg.measure_index.size(); ++i) {
        w.gens.push_back(cfg.gens[static_cast<std::size_t>(cfg.measure_index[i])]);
        w.names.push_back(cfg.gen_names[static_cast<std::size_t>(cfg.measure_index[i])]);
    }
    int nw = static_cast<int>(w.gens.size());
    std::vector<int> inv(static_cast<std::size_t>(nw), -1);
    for (int i = 0; i < nw; ++i) {
        if (inv[static_cast<std::size_t>(i)] >= 0) continue;
        Iet gi = inverse(w.gens[static_cast<std::size_t>(i)]);
        if (iet_equal(gi, w.gens[static_cast<std::size_t>(i)])) {
            inv[static_cast<std::size_t>(i)] = i;
            continue;
        }
        for (int j = i + 1; j < nw; ++j)
            if (inv[static_cast<std::size_t>(j)] < 0 &&
                iet_equal(gi, w.gens[static_cast<std::size_t>(j)])) {
                inv[static_cast<std::size_t>(i)] = j;
                inv[static_cast<std::size_t>(j)] = i;
                break;
            }
        if (inv[static_cast<std::size_t>(i)] < 0)
            throw config_error("the measure must be closed under inverses; generator '" +
                               w.names[static_cast<std::size_t>(i)] +
                               "' has no inverse in the list");
    }
    bool symmetric = true;
    for (int i = 0; i < nw; ++i)
        if (cfg.measure_weight[static_cast<std::size_t>(i)] !=
            cfg.measure_weight[static_cast<std::size_t>(inv[static_cast<std::size_t>(i)])])
            symmetric = false;
    w.spec.weight = cfg.measure_weight;
    w.spec.inverse_of = std::move(inv);
    w.spec.symmetric = symmetric;
    w.spec.horizon = cfg.horizon;
    w.spec.trajectories = cfg.trajectories;
    w.spec.seed = cfg.seed;
    w.spec.checkpoints = cfg.checkpoints;
    w.spec.epsilon_grid = cfg.epsilons;
    w.spec.threads = threads;
    w.spec.block_size = 64;
    finalize_walk_spec(w.spec);
    return w;
}

/* the exact oracles only need the measure itself: the action provides its
   own generator inverses, and the return identity holds for any measure */
struct MeasureSetup {
    std::vector<Iet> gens;
    std::vector<mpq_class> weight;
};

MeasureSetup measure_only(const ExperimentConfig& cfg) {
    MeasureSetup ms;
    for (std::size_t i = 0; i < cfg.measure_index.size(); ++i)
        ms.gens.push_back(cfg.gens[static_cast<std::size_t>(cfg.measure_index[i])]);
    ms.weight = cfg.measure_weight;
    return ms;
}

/* When every walk generator is a rotation the orbit and configuration
   statistics only depend on coordinate increments, and the coset of the
   base point maps to the coordinate lattice by an injection (rational
   independence), so the walk runs on packed 64-bit lattice points instead
   of exact circle points.  Returns nothing when a coordinate range cannot
   be packed for this horizon; the caller then runs the circle action. */
std::optional<LatticeAction> lattice_for(const ExperimentConfig& cfg, const std::vector<Iet>& gens,
                                         long horizon) {
    if (!cfg.has_group || cfg.group->d() > 3) return std::nullopt;
    for (const Iet& g : gens)
        if (!g.is_rotation()) return std::nullopt;
    std::vector<LatticeAction::Pt> moves;
    for (const Iet& g : gens) {
        const Angle& a = g.shift(0);
        LatticeAction::Pt mv{a.p, 0, 0, 0};
        for (std::size_t i = 0; i < a.k.size() && i < 3; ++i) mv[i + 1] = a.k[i];
        moves.push_back(mv);
    }
    try {
        return LatticeAction(cfg.group->m(), cfg.group->d(), std::move(moves), horizon);
    } catch (const config_error&) {
        return std::nullopt;
    }
}

template <class F>
auto with_walk_action(const ExperimentConfig& cfg, const std::vector<Iet>& gens, long horizon,
                      F&& f) {
    if (auto lat = lattice_for(cfg, gens, horizon)) return f(*lat, "lattice-coordinates");
    return f(IetAction(gens, cfg.walk_base()), "circle-iet");
}

nlohmann::json base_record(const ExperimentConfig& cfg) {
    return nlohmann::json{{"experiment", cfg.id},
                          {"kind", kind_name(cfg.kind)},
                          {"config_hash", hex64(cfg.raw_hash)},
                          {"input_hash", hex64(cfg.canonical_hash)}};
}

nlohmann::json rng_accounting(const WalkSpec& s) {
    return nlohmann::json{{"algorithm", "splitmix64"},
                          {"discipline", "one stream per trajectory index"},
                          {"block_size", s.block_size}};
}

/* the (x, y, yerr) table every experiment ships next to its records */
std::string csv_from_records(ExperimentKind kind, const std::vector<nlohmann::json>& records) {
    std::ostringstream os;
    os << "x,y,yerr\n";
    auto row = [&](double x, double y, double e) {
        os << g17(x) << "," << g17(y) << "," << g17(e) << "\n";
    };
    for (const nlohmann::json& r : records) {
        bool summary = r.contains("row") && r["row"] == "summary";
        switch (kind) {
        case ExperimentKind::inverted_orbit:
            if (!summary) row(r["n"], r["mean_ratio"], r["ratio_stderr"]);
            break;
        case ExperimentKind::recurrence:
            if (!summary) row(r["n"], r["p_t_gt"], r["p_t_gt_stderr"]);
            break;
        case ExperimentKind::sws_return:
            if (!summary) row(r["n"], r["p_empty"], r["p_empty_stderr"]);
            break;
        case ExperimentKind::tau_probe:
            if (!summary) row(r["n"], r["stabilized"], r["stabilized_stderr"]);
            break;
        case ExperimentKind::drift:
            if (summary)
                for (std::size_t i = 0; i < r["mean"].size(); ++i)
                    row(static_cast<double>(i), r["mean"][i], r["se"][i]);
            break;
        case ExperimentKind::schreier:
            if (!summary) row(r["radius"], r["vertices"], 0.0);
            break;
        case ExperimentKind::complexity:
            if (!summary) row(r["n"], r["rho"], 0.0);
            break;
        case ExperimentKind::colored_line_decay:
            if (!summary) {
                auto y = num(r, "agree_freq");
                auto e = num(r, "agree_stderr");
                if (y && e) row(r["n"], *y, *e);
            }
            break;
        case ExperimentKind::oracle_crosscheck:
            if (!summary)
                row(r["n"], parse_rational(r["orbit_mean_half_pow"].get<std::string>()).get_d(),
                    0.0);
            break;
        }
    }
    return os.str();
}

RunArtifacts run_orbit_like(const ExperimentConfig& cfg, int threads) {
    WalkSetup w = make_walk_setup(cfg, threads);
    if (cfg.kind == ExperimentKind::recurrence && !w.spec.symmetric)
        throw config_error("recurrence estimate requires a symmetric measure");
    std::string action_used;
    OrbitEstimates est = with_walk_action(
        cfg, w.gens, cfg.horizon, [&](const auto& act, const char* label) {
            action_used = label;
            return estimate_prop41(act, w.spec);
        });
    RunArtifacts art;
    for (const OrbitSeriesRow& r : est.rows) {
        nlohmann::json j = base_record(cfg);
        j["n"] = r.n;
        j["mean_size"] = r.mean_size;
        j["size_stderr"] = r.size_stderr;
        j["mean_ratio"] = r.mean_ratio;
        j["ratio_stderr"] = r.ratio_stderr;
        j["rate"] = r.rate;
        j["p_t_gt"] = r.p_t_gt;
        j["p_t_gt_stderr"] = r.p_t_gt_stderr;
        if (!r.eps_probs.empty()) {
            j["eps_probs"] = r.eps_probs;
            j["eps_thresholds"] = r.eps_thresholds;
        }
        art.records.push_back(std::move(j));
    }
    nlohmann::json s = base_record(cfg);
    s["row"] = "summary";
    s["action"] = action_used;
    s["horizon"] = est.horizon;
    s["trajectories"] = est.trajectories;
    s["seed"] = est.seed;
    s["escape_censored"] = est.escape_censored;
    s["escape_censored_stderr"] = est.escape_censored_stderr;
    s["escape_slope"] = est.escape_slope;
    s["escape_slope_stderr"] = est.escape_slope_stderr;
    s["rng"] = rng_accounting(w.spec);
    art.records.push_back(std::move(s));
    return art;
}

RunArtifacts run_sws(const ExperimentConfig& cfg, int threads) {
    WalkSetup w = make_walk_setup(cfg, threads);
    std::string action_used;
    std::vector<SwsFreqRow> rows = with_walk_action(
        cfg, w.gens, cfg.horizon, [&](const auto& act, const char* label) {
            action_used = label;
            return estimate_sws_return(act, w.spec);
        });
    RunArtifacts art;
    for (const SwsFreqRow& r : rows) {
        nlohmann::json j = base_record(cfg);
        j["n"] = r.n;
        j["p_empty"] = r.p_empty;
        j["p_empty_stderr"] = r.p_empty_stderr;
        art.records.push_back(std::move(j));
    }
    nlohmann::json s = base_record(cfg);
    s["row"] = "summary";
    s["action"] = action_used;
    s["horizon"] = w.spec.horizon;
    s["trajectories"] = w.spec.trajectories;
    s["seed"] = w.spec.seed;
    s["rng"] = rng_accounting(w.spec);
    art.records.push_back(std::move(s));
    return art;
}

/* deterministic probe points: base, torsion and small free coordinates all
   drawn from one dedicated splitmix64 stream of the walk seed */
std::vector<Point> probe_points(const ExperimentConfig& cfg) {
    SplitMix64 rng = stream_for(cfg.seed, 0x5A'3B'1E'55ull);
    std::vector<Point> out;
    const AngleGroup& g = *cfg.group;
    for (long i = 0; i < cfg.samples; ++i) {
        int base = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.base_count())));
        long long p = static_cast<long long>(rng.below(static_cast<std::uint64_t>(g.m())));
        coord_vec k;
        for (int c = 0; c < g.d(); ++c)
            k.push_back(static_cast<long long>(rng.below(7)) - 3);
        out.push_back(point_make(g, base, angle_make(g, p, std::move(k))));
    }
    return out;
}

RunArtifacts run_tau(const ExperimentConfig& cfg, int threads) {
    WalkSetup w = make_walk_setup(cfg, threads);
    TauProbeReport rep = tau_infinity_probe(w.gens, w.spec, probe_points(cfg));
    RunArtifacts art;
    for (const TauProbeRow& r : rep.rows) {
        nlohmann::json j = base_record(cfg);
        j["n"] = r.n;
        j["stabilized"] = r.stabilized;
        j["stabilized_stderr"] = r.stabilized_stderr;
        j["mean_changes"] = r.mean_changes;
        art.records.push_back(std::move(j));
    }
    nlohmann::json s = base_record(cfg);
    s["row"] = "summary";
    s["horizon"] = rep.horizon;
    s["trajectories"] = rep.trajectories;
    s["sample_points"] = rep.sample_points;
    s["seed"] = w.spec.seed;
    s["rng"] = rng_accounting(w.spec);
    art.records.push_back(std::move(s));
    return art;
}

RunArtifacts run_drift(const ExperimentConfig& cfg, int threads) {
    WalkSetup w = make_walk_setup(cfg, threads);
    DriftReport rep = drift_probe(w.gens, w.spec, cfg.walk_base());
    RunArtifacts art;
    nlohmann::json s = base_record(cfg);
    s["row"] = "summary";
    s["mean"] = rep.mean;
    s["se"] = rep.se;
    s["horizon"] = rep.horizon;
    s["trajectories"] = rep.trajectories;
    s["seed"] = w.spec.seed;
    s["rng"] = rng_accounting(w.spec);
    art.records.push_back(std::move(s));
    return art;
}

RunArtifacts run_schreier(const ExperimentConfig& cfg) {
    Point x0 = cfg.walk_base();
    RunArtifacts art;
    SchreierBall full;
    for (long r = 0; r <= cfg.radius; ++r) {
        SchreierBall ball = schreier_ball(cfg.gens, x0, r);
        nlohmann::json j = base_record(cfg);
        j["radius"] = r;
        j["vertices"] = ball.vertices.size();
        j["edges"] = ball.edges.size();
        art.records.push_back(std::move(j));
        if (r == cfg.radius) full = std::move(ball);
    }
    LambdaEmbedding emb = lambda_embedding(full, x0);
    nlohmann::json s = base_record(cfg);
    s["row"] = "summary";
    s["radius"] = cfg.radius;
    s["vertices"] = full.vertices.size();
    s["edges"] = full.edges.size();
    s["lipschitz"] = emb.lipschitz;
    s["base"] = point_str(x0);
    art.records.push_back(std::move(s));
    art.files.emplace_back("schreier.dot", schreier_dot(full));
    return art;
}

RunArtifacts run_complexity(const ExperimentConfig& cfg) {
    std::vector<int> bases = cfg.bases.empty() ? std::vector<int>{0} : cfg.bases;
    std::vector<Angle> S;
    for (const std::string& t : cfg.cut_angle_text) S.push_back(angle_parse(*cfg.group, t));
    ComplexityProfile p = complexity_profile(*cfg.group, bases, S, cfg.n_max);
    RunArtifacts art;
    for (std::size_t n = 0; n < p.rho.size(); ++n) {
        nlohmann::json j = base_record(cfg);
        j["n"] = n;
        j["rho"] = p.rho[n];
        art.records.push_back(std::move(j));
    }
    nlohmann::json s = base_record(cfg);
    s["row"] = "summary";
    s["exponent"] = p.exponent;
    s["exponent_stderr"] = p.exponent_stderr;
    s["empirical_c"] = p.empirical_c;
    s["n_max"] = cfg.n_max;
    art.records.push_back(std::move(s));
    return art;
}

RunArtifacts run_decay(const ExperimentConfig& cfg, int threads) {
    ColoredLine line(cfg.line_seed);
    MarkRegistry reg(line, cfg.scan_budget, cfg.guard);
    DecaySpec spec;
    spec.horizon = cfg.horizon;
    spec.trajectories = cfg.trajectories;
    spec.seed = cfg.seed;
    spec.checkpoints = cfg.checkpoints;
    spec.threads = threads;
    spec.block_size = 64;
    spec.word_budget = cfg.word_budget;
    DecayReport rep = decay_estimate(line, reg, spec);
    RunArtifacts art;
    /* an all-disagree checkpoint has an infinite rate; JSON has no inf, so
       non-finite values are omitted rather than silently nulled */
    auto put = [](nlohmann::json& j, const char* k, double v) {
        if (std::isfinite(v)) j[k] = v;
    };
    for (const DecayRow& r : rep.rows) {
        nlohmann::json j = base_record(cfg);
        j["n"] = r.n;
        j["total"] = r.total;
        j["agree"] = r.agree;
        j["censored"] = r.censored;
        j["empty"] = r.empty;
        j["empty_agree"] = r.empty_agree;
        put(j, "agree_freq", r.agree_freq);
        put(j, "agree_stderr", r.agree_stderr);
        put(j, "rate", r.rate);
        put(j, "rate_lo99", r.rate_lo99);
        art.records.push_back(std::move(j));
    }
    nlohmann::json s = base_record(cfg);
    s["row"] = "summary";
    s["horizon"] = rep.horizon;
    s["trajectories"] = rep.trajectories;
    s["seed"] = rep.seed;
    s["word_budget"] = rep.word_budget;
    s["line_seed"] = cfg.line_seed;
    s["marks"] = reg.mark_count();
    s["frontier"] = reg.frontier();
    s["rng"] = nlohmann::json{{"algorithm", "splitmix64"},
                              {"discipline", "one stream per trajectory index"},
                              {"block_size", spec.block_size}};
    art.records.push_back(std::move(s));
    art.files.emplace_back("registry.csv", reg.audit_csv());
    return art;
}

RunArtifacts run_oracle(const ExperimentConfig& cfg) {
    MeasureSetup ms = measure_only(cfg);
    int n = cfg.oracle_n;
    std::string action_used;
    auto pair = with_walk_action(
        cfg, ms.gens, std::max<long>(1, n), [&](const auto& act, const char* label) {
            action_used = label;
            OrbitOracleResult orc = exact_orbit_oracle(act, ms.weight, n, cfg.oracle_budget);
            std::vector<mpq_class> sws = exact_sws_return(act, ms.weight, n, cfg.oracle_budget);
            return std::make_pair(std::move(orc), std::move(sws));
        });
    const OrbitOracleResult& orc = pair.first;
    const std::vector<mpq_class>& sws = pair.second;
    RunArtifacts art;
    bool all_equal = true;
    for (int k = 0; k <= n; ++k) {
        nlohmann::json j = base_record(cfg);
        j["n"] = k;
        j["orbit_mean_half_pow"] = rational_str(orc.mean_half_pow[static_cast<std::size_t>(k)]);
        j["sws_return"] = rational_str(sws[static_cast<std::size_t>(k)]);
        /* the return identity is a statement about n >= 1; the k = 0 row
           only anchors the two series */
        if (k >= 1) {
            bool eq = orc.mean_half_pow[static_cast<std::size_t>(k)] ==
                      sws[static_cast<std::size_t>(k)];
            all_equal = all_equal && eq;
            j["equal"] = eq;
        }
        art.records.push_back(std::move(j));
    }
    nlohmann::json s = base_record(cfg);
    s["row"] = "summary";
    s["action"] = action_used;
    s["n"] = n;
    s["all_equal"] = all_equal;
    nlohmann::json dist = nlohmann::json::object();
    for (const auto& [size, prob] : orc.size_dist) dist[std::to_string(size)] = rational_str(prob);
    s["size_dist"] = std::move(dist);
    art.records.push_back(std::move(s));
    return art;
}

} // namespace

int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int threads) {
    if (threads < 1 || threads > 256) throw config_error("thread count must lie in [1, 256]");
    auto t0 = std::chrono::steady_clock::now();
    RunArtifacts art;
    switch (cfg.kind) {
    case ExperimentKind::inverted_orbit:
    case ExperimentKind::recurrence: art = run_orbit_like(cfg, threads); break;
    case ExperimentKind::sws_return: art = run_sws(cfg, threads); break;
    case ExperimentKind::tau_probe: art = run_tau(cfg, threads); break;
    case ExperimentKind::drift: art = run_drift(cfg, threads); break;
    case ExperimentKind::schreier: art = run_schreier(cfg); break;
    case ExperimentKind::complexity: art = run_complexity(cfg); break;
    case ExperimentKind::colored_line_decay: art = run_decay(cfg, threads); break;
    case ExperimentKind::oracle_crosscheck: art = run_oracle(cfg); break;
    }
    art.files.emplace_back(cfg.id + ".csv", csv_from_records(cfg.kind, art.records));
    double wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    write_run(out_dir, cfg.raw_text, cfg.raw_hash, art, wall_ms, threads);
    return static_cast<int>(art.records.size());
}

namespace {

const nlohmann::json* summary_of(const std::vector<nlohmann::json>& recs) {
    for (const nlohmann::json& r : recs)
        if (r.contains("row") && r["row"] == "summary") return &r;
    return nullptr;
}

void render_experiment(std::ostringstream& os, const std::string& id, ExperimentKind kind,
                       const std::vector<nlohmann::json>& recs) {
    const nlohmann::json* sum = summary_of(recs);
    os << "experiment " << id << " (" << kind_name(kind) << ")\n";
    auto series = [&](auto&& header, auto&& line) {
        header();
        for (const nlohmann::json& r : recs) {
            if (r.contains("row") && r["row"] == "summary") continue;
            line(r);
        }
    };
    switch (kind) {
    case ExperimentKind::inverted_orbit:
        series([&] { os << "  n  |O_n|/n ± err  |O_n| ± err  rate\n"; },
               [&](const nlohmann::json& r) {
                   os << "  " << r["n"].get<long>() << "  "
                      << pm(r["mean_ratio"], r["ratio_stderr"]) << "  "
                      << pm(r["mean_size"], r["size_stderr"]) << "  "
                      << g6(r["rate"]) << "\n";
               });
        if (sum)
            os << "  escape: censored " << pm((*sum)["escape_censored"],
                                              (*sum)["escape_censored_stderr"])
               << " | slope " << pm((*sum)["escape_slope"], (*sum)["escape_slope_stderr"])
               << "\n";
        break;
    case ExperimentKind::recurrence:
        series([&] { os << "  n  P(T>n) ± err  |O_n|/n ± err\n"; },
               [&](const nlohmann::json& r) {
                   os << "  " << r["n"].get<long>() << "  "
                      << pm(r["p_t_gt"], r["p_t_gt_stderr"]) << "  "
                      << pm(r["mean_ratio"], r["ratio_stderr"]) << "\n";
               });
        if (sum)
            os << "  escape estimators: censored "
               << pm((*sum)["escape_censored"], (*sum)["escape_censored_stderr"]) << " | slope "
               << pm((*sum)["escape_slope"], (*sum)["escape_slope_stderr"]) << "\n";
        break;
    case ExperimentKind::sws_return:
        series([&] { os << "  n  P(f_n = 0) ± err\n"; },
               [&](const nlohmann::json& r) {
                   os << "  " << r["n"].get<long>() << "  "
                      << pm(r["p_empty"], r["p_empty_stderr"]) << "\n";
               });
        break;
    case ExperimentKind::tau_probe:
        series([&] { os << "  n  stabilized ± err  changes/point\n"; },
               [&](const nlohmann::json& r) {
                   os << "  " << r["n"].get<long>() << "  "
                      << pm(r["stabilized"], r["stabilized_stderr"]) << "  "
                      << g6(r["mean_changes"]) << "\n";
               });
        if (sum) os << "  sample points: " << (*sum)["sample_points"].get<long>() << "\n";
        break;
    case ExperimentKind::drift:
        if (sum) {
            os << "  coordinate  mean ± err\n";
            for (std::size_t i = 0; i < (*sum)["mean"].size(); ++i)
                os << "  " << i << "  " << pm((*sum)["mean"][i], (*sum)["se"][i]) << "\n";
        }
        break;
    case ExperimentKind::schreier:
        series([&] { os << "  radius  vertices  edges\n"; },
               [&](const nlohmann::json& r) {
                   os << "  " << r["radius"].get<long>() << "  " << r["vertices"].get<long>()
                      << "  " << r["edges"].get<long>() << "\n";
               });
        if (sum) os << "  coordinate embedding lipschitz: " << g6((*sum)["lipschitz"]) << "\n";
        break;
    case ExperimentKind::complexity: {
        long count = 0;
        for (const nlohmann::json& r : recs)
            if (!(r.contains("row") && r["row"] == "summary")) ++count;
        long stride = std::max<long>(1, count / 16);
        os << "  n  rho(n)\n";
        long i = 0;
        for (const nlohmann::json& r : recs) {
            if (r.contains("row") && r["row"] == "summary") continue;
            if (i % stride == 0 || i == count - 1)
                os << "  " << r["n"].get<long>() << "  " << r["rho"].get<long>() << "\n";
            ++i;
        }
        if (sum) {
            double e = (*sum)["exponent"], se = (*sum)["exponent_stderr"];
            os << "  fitted exponent: " << g6(e) << " ± " << g6(se) << "  (95% band ["
               << g6(e - 2 * se) << ", " << g6(e + 2 * se) << "])\n";
        }
        break;
    }
    case ExperimentKind::colored_line_decay:
        series(
            [&] { os << "  n  agree ± err  rate  rate_lo99  censored  empty\n"; },
            [&](const nlohmann::json& r) {
                os << "  " << r["n"].get<long>() << "  "
                   << pm(num(r, "agree_freq").value_or(0.0),
                         num(r, "agree_stderr").value_or(0.0))
                   << "  " << num_str(r, "rate") << "  " << num_str(r, "rate_lo99") << "  "
                   << r["censored"].get<long long>() << "  " << r["empty"].get<long long>()
                   << "\n";
            });
        break;
    case ExperimentKind::oracle_crosscheck:
        series([&] { os << "  n  E 2^-|O_n|  P(f_n = 0)  equal\n"; },
               [&](const nlohmann::json& r) {
                   os << "  " << r["n"].get<long>() << "  "
                      << r["orbit_mean_half_pow"].get<std::string>() << "  "
                      << r["sws_return"].get<std::string>() << "  "
                      << (!r.contains("equal") ? "-"
                                               : r["equal"].get<bool>() ? "yes" : "NO")
                      << "\n";
               });
        if (sum)
            os << "  identity " << ((*sum)["all_equal"].get<bool>() ? "holds" : "FAILS")
               << " for 1 <= n <= " << (*sum)["n"].get<int>() << "\n";
        break;
    }
}

} // namespace

std::string report_text(const std::string& dir) {
    std::vector<nlohmann::json> records = read_records(dir);
    if (records.empty()) return "no records\n";
    std::vector<std::string> order;
    std::map<std::string, std::vector<nlohmann::json>> by_id;
    for (nlohmann::json& r : records) {
        if (!r.contains("experiment") || !r.contains("kind"))
            throw config_error("record without experiment/kind fields in " + dir);
        std::string id = r["experiment"].get<std::string>();
        if (!by_id.count(id)) order.push_back(id);
        by_id[id].push_back(std::move(r));
    }
    std::ostringstream os;
    for (const std::string& id : order) {
        const std::vector<nlohmann::json>& recs = by_id[id];
        std::string kind_text = recs.front()["kind"].get<std::string>();
        std::string hash_text = recs.front().value("config_hash", "");
        for (const nlohmann::json& r : recs) {
            if (r["kind"].get<std::string>() != kind_text)
                throw config_error("experiment '" + id + "' mixes kinds " + kind_text + " and " +
                                   r["kind"].get<std::string>());
            if (r.value("config_hash", "") != hash_text)
                throw config_error("experiment '" + id + "' mixes records of different configs");
        }
        ExperimentKind kind = kind_from_name(kind_text);
        render_experiment(os, id, kind, recs);
        write_text_file(dir + "/" + id + "-report.csv", csv_from_records(kind, recs));
        os << "\n";
    }
    return os.str();
}

std::string oracle_text(const ExperimentConfig& cfg, int n) {
    if (cfg.measure_index.empty() || !cfg.has_group)
        throw config_error("the oracle needs an [angles] section, generators and a measure");
    MeasureSetup ms = measure_only(cfg);
    auto pair = with_walk_action(
        cfg, ms.gens, std::max<long>(1, n), [&](const auto& act, const char*) {
            OrbitOracleResult orc = exact_orbit_oracle(act, ms.weight, n, cfg.oracle_budget);
            std::vector<mpq_class> sws = exact_sws_return(act, ms.weight, n, cfg.oracle_budget);
            return std::make_pair(std::move(orc), std::move(sws));
        });
    std::ostringstream os;
    os << "n\tE 2^-|O_n|\tP(f_n = 0)\tequal\n";
    bool all = true;
    for (int k = 0; k <= n; ++k) {
        std::string eq = "-"; // the identity is a statement about n >= 1
        if (k >= 1) {
            bool e = pair.first.mean_half_pow[static_cast<std::size_t>(k)] ==
                     pair.second[static_cast<std::size_t>(k)];
            all = all && e;
            eq = e ? "yes" : "NO";
        }
        os << k << "\t" << rational_str(pair.first.mean_half_pow[static_cast<std::size_t>(k)])
           << "\t" << rational_str(pair.second[static_cast<std::size_t>(k)]) << "\t" << eq
           << "\n";
    }
    os << (all ? "identity holds for 1 <= n <= " + std::to_string(n) + "\n"
               : "IDENTITY VIOLATION\n");
    return os.str();
}

int default_threads() {
    if (const char* env = std::getenv("EXPCTL_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (*env == '\0' || *end != '\0' || v < 1 || v > 256)
            throw config_error("EXPCTL_THREADS must be an integer in [1, 256]");
        return static_cast<int>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    if (hc == 0) return 1;
    return static_cast<int>(std::min(hc, 256u));
}

} // namespace iet
