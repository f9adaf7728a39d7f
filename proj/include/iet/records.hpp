#pragma once
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace iet {

/* On-disk layout of one output directory:

       records.jsonl        one JSON object per line, append-only across runs
       <id>.csv             per-checkpoint table (x, y, yerr) of the last run
       config-<hash>.txt    raw config bytes, keyed by content hash so the
                            recorded hashes stay recomputable
       meta.jsonl           wall clock / thread count per run, append-only;
                            quarantined here so records.jsonl stays
                            byte-identical across reruns
       *.dot and friends    extra artifacts some experiments produce

   Records carry no timing and no thread count, so a rerun with a different
   parallelism writes the same bytes. */
struct RunArtifacts {
    std::vector<nlohmann::json> records;
    std::vector<std::pair<std::string, std::string>> files; // name -> content
};

void write_run(const std::string& out_dir, const std::string& raw_config,
               std::uint64_t config_hash, const RunArtifacts& art, double wall_ms, int threads);

/* All records in <dir>/records.jsonl, file order.  A missing or empty file
   is an empty list; a missing directory is a config_error. */
std::vector<nlohmann::json> read_records(const std::string& dir);

void write_text_file(const std::string& path, const std::string& content);

} // namespace iet
