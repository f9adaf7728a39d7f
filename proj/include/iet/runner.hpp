#pragma once
#include <string>

#include "iet/config.hpp"

namespace iet {

/* Execute one experiment and write its artifacts into out_dir (created if
   needed).  Records never contain timing or thread counts, so reruns of the
   same config are byte-identical at any parallelism.  Returns the number of
   records written. */
int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int threads);

/* Human-readable summary of every experiment recorded under dir; also
   rewrites one <id>-report.csv (x, y, yerr) per experiment.  Records of one
   experiment id must agree on kind and config hash. */
std::string report_text(const std::string& dir);

/* Exact small-n crosscheck table for the config's walk: the enumerated
   inverted-orbit functional E 2^{-|O_k|} against the switch-walk-switch
   return probability P(f_k = 0), k = 0..n. */
std::string oracle_text(const ExperimentConfig& cfg, int n);

/* EXPCTL_THREADS when set, hardware concurrency otherwise, clamped to
   [1, 256]. */
int default_threads();

} // namespace iet
