#include "iet/records.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "iet/errors.hpp"
#include "iet/rational.hpp"

namespace fs = std::filesystem;

namespace iet {

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
    if (!out.flush()) throw std::runtime_error("short write to '" + path + "'");
}

void write_run(const std::string& out_dir, const std::string& raw_config,
               std::uint64_t config_hash, const RunArtifacts& art, double wall_ms, int threads) {
    fs::create_directories(out_dir);
    write_text_file(out_dir + "/config-" + hex64(config_hash) + ".txt", raw_config);
    {
        std::ofstream rec(out_dir + "/records.jsonl", std::ios::binary | std::ios::app);
        if (!rec) throw std::runtime_error("cannot write '" + out_dir + "/records.jsonl'");
        for (const nlohmann::json& r : art.records) rec << r.dump() << "\n";
        if (!rec.flush()) throw std::runtime_error("short write to records.jsonl");
    }
    for (const auto& [name, content] : art.files) write_text_file(out_dir + "/" + name, content);
    {
        nlohmann::json meta{{"config_hash", hex64(config_hash)},
                            {"records", art.records.size()},
                            {"threads", threads},
                            {"wall_ms", wall_ms}};
        std::ofstream m(out_dir + "/meta.jsonl", std::ios::binary | std::ios::app);
        if (!m) throw std::runtime_error("cannot write '" + out_dir + "/meta.jsonl'");
        m << meta.dump() << "\n";
    }
}

std::vector<nlohmann::json> read_records(const std::string& dir) {
    if (!fs::is_directory(dir)) throw config_error("'" + dir + "' is not a directory");
    std::vector<nlohmann::json> out;
    std::ifstream in(dir + "/records.jsonl", std::ios::binary);
    if (!in) return out;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::parse_error& e) {
            throw config_error("records.jsonl line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

} // namespace iet
