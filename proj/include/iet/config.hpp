#pragma once
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "iet/angle_group.hpp"
#include "iet/iet.hpp"
#include "iet/rational.hpp"

namespace iet {

/* Experiment configuration files.  INI-style structured text:

       [experiment]
       kind = recurrence
       id = rank3-rotations

       [angles]
       m = 12
       theta = 0.41421356237309504, 0.73205080756887729
       sigma = 0

       [generator a]
       map = rot 0/12 + [1,0]·θ

       [walk]
       measure = a:1/4, a':1/4, b:1/4, b':1/4
       horizon = 1000
       trajectories = 100000
       seed = 7

   Full lines starting with '#' or ';' are comments; there are no inline
   comments because IET maps legitimately contain ';'.  Rationals are
   written p/q, reals as decimal strings (declared rationally independent
   as given).  Lists split on commas except cut-angles, which splits on
   ';' because angle coordinates contain commas.  Unknown sections and
   keys are rejected so a typo cannot silently change an experiment. */

enum class ExperimentKind {
    inverted_orbit,
    recurrence,
    sws_return,
    tau_probe,
    drift,
    schreier,
    complexity,
    colored_line_decay,
    oracle_crosscheck,
};

const char* kind_name(ExperimentKind k);
ExperimentKind kind_from_name(const std::string& name);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::inverted_orbit;
    std::string id;

    /* [angles]; the group is heap-held so parsed maps and points keep a
       stable pointer when the config moves around */
    bool has_group = false;
    std::shared_ptr<AngleGroup> group;
    long m = 1;
    std::vector<std::string> theta_text, sigma_text;

    /* [generator NAME], declaration order */
    std::vector<std::string> gen_names;
    std::vector<Iet> gens;

    /* [walk] */
    bool has_walk = false;
    std::vector<int> measure_index; // into gens, declaration order of the list
    std::vector<mpq_class> measure_weight;
    bool has_base = false;
    std::string base_text; // canonical point string when set
    long horizon = 0;
    long long trajectories = 0;
    bool has_seed = false;
    std::uint64_t seed = 0;
    std::vector<long> checkpoints;
    std::vector<double> epsilons;

    /* [line] */
    bool has_line = false;
    std::uint64_t line_seed = 0;
    int word_budget = 2;
    long long scan_budget = 1LL << 27;
    long long guard = 4096;

    /* [probe] */
    long samples = 32;
    long radius = 4;
    long n_max = 64;
    std::vector<int> bases;
    std::vector<std::string> cut_angle_text;
    int oracle_n = 6;
    long long oracle_budget = 10'000'000;

    std::string raw_text;       // file bytes as read
    std::string canonical_text; // normalized rendering of the parsed config
    std::uint64_t raw_hash = 0;       // fnv1a64 of raw_text
    std::uint64_t canonical_hash = 0; // fnv1a64 of canonical_text

    int gen_index(const std::string& name) const; // -1 when absent
    Point walk_base() const; // parsed base or x0 of the group
};

/* Parse and validate; config_error messages carry "line N:" where the
   offending text has a location. */
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

} // namespace iet
