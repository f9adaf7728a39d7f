#include "iet/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "iet/errors.hpp"

namespace iet {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail_at(int line, int col, const std::string& msg) {
    throw config_error("line " + std::to_string(line) + ", col " + std::to_string(col) + ": " +
                       msg);
}

struct RawEntry {
    std::string key, value;
    int line = 0, col = 0; // col points at the value
};

struct RawSection {
    std::string name, arg; // "[generator a]" -> name "generator", arg "a"
    int line = 0;
    std::vector<RawEntry> entries;
};

bool valid_name(const std::string& s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '\'')
            return false;
    return true;
}

std::vector<RawSection> tokenize(const std::string& text) {
    std::vector<RawSection> out;
    std::size_t pos = 0;
    int lineno = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? nl : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string body = trim(line);
        if (body.empty() || body[0] == '#' || body[0] == ';') continue;
        if (body[0] == '[') {
            if (body.back() != ']') fail_at(lineno, 1, "unterminated section header");
            std::string inside = trim(body.substr(1, body.size() - 2));
            std::size_t sp = inside.find_first_of(" \t");
            RawSection sec;
            sec.name = sp == std::string::npos ? inside : inside.substr(0, sp);
            sec.arg = sp == std::string::npos ? "" : trim(inside.substr(sp));
            sec.line = lineno;
            if (sec.name.empty()) fail_at(lineno, 1, "empty section header");
            out.push_back(std::move(sec));
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail_at(lineno, 1, "expected 'key = value' or a [section] header");
        if (out.empty()) fail_at(lineno, 1, "entry before the first section header");
        RawEntry e;
        e.key = trim(line.substr(0, eq));
        e.value = trim(line.substr(eq + 1));
        e.line = lineno;
        std::size_t vstart = line.find_first_not_of(" \t", eq + 1);
        e.col = static_cast<int>((vstart == std::string::npos ? eq + 1 : vstart) + 1);
        if (e.key.empty()) fail_at(lineno, 1, "empty key");
        out.back().entries.push_back(std::move(e));
    }
    return out;
}

/* hands out entries by key and rejects leftovers, so typos fail loudly */
class SectionReader {
public:
    explicit SectionReader(const RawSection& sec) : sec_(sec), used_(sec.entries.size(), false) {}

    std::optional<RawEntry> take(const std::string& key) {
        std::optional<RawEntry> found;
        for (std::size_t i = 0; i < sec_.entries.size(); ++i) {
            if (sec_.entries[i].key != key) continue;
            if (found)
                fail_at(sec_.entries[i].line, 1,
                        "duplicate key '" + key + "' in [" + sec_.name + "]");
            found = sec_.entries[i];
            used_[i] = true;
        }
        return found;
    }

    void done() const {
        for (std::size_t i = 0; i < sec_.entries.size(); ++i)
            if (!used_[i])
                fail_at(sec_.entries[i].line, 1,
                        "unknown key '" + sec_.entries[i].key + "' in [" + sec_.name + "]");
    }

private:
    const RawSection& sec_;
    std::vector<bool> used_;
};

long long entry_int(const RawEntry& e, long long lo, long long hi) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(e.value.c_str(), &end, 10);
    if (e.value.empty() || *end != '\0' || errno == ERANGE)
        fail_at(e.line, e.col, "'" + e.key + "' expects an integer, got '" + e.value + "'");
    if (v < lo || v > hi)
        fail_at(e.line, e.col,
                "'" + e.key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                    "], got " + e.value);
    return v;
}

std::uint64_t entry_u64(const RawEntry& e) {
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
    if (e.value.empty() || *end != '\0' || errno == ERANGE || e.value[0] == '-')
        fail_at(e.line, e.col,
                "'" + e.key + "' expects an unsigned integer, got '" + e.value + "'");
    return v;
}

double entry_double_item(const RawEntry& e, const std::string& item) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        fail_at(e.line, e.col, "'" + e.key + "' expects decimal numbers, got '" + item + "'");
    return v;
}

std::vector<std::string> split_list(const RawEntry& e, char sep) {
    std::vector<std::string> out;
    if (trim(e.value).empty()) return out;
    std::size_t pos = 0;
    while (true) {
        std::size_t c = e.value.find(sep, pos);
        std::string item = trim(e.value.substr(pos, c == std::string::npos ? c : c - pos));
        if (item.empty())
            fail_at(e.line, e.col, "empty item in '" + e.key + "' list");
        out.push_back(std::move(item));
        if (c == std::string::npos) break;
        pos = c + 1;
    }
    return out;
}

/* integers and p/q stay exact; anything with a '.' is a declared decimal */
RealEnclosure enclosure_from(const RawEntry& e, const std::string& item) {
    try {
        if (item.find('.') == std::string::npos) return RealEnclosure::exact(parse_rational(item));
        return RealEnclosure::decimal(item);
    } catch (const config_error& err) {
        fail_at(e.line, e.col, err.what());
    }
}

mpq_class entry_rational(const RawEntry& e, const std::string& item) {
    try {
        return parse_rational(item);
    } catch (const config_error& err) {
        fail_at(e.line, e.col, err.what());
    }
}

const char* const kKindNames[] = {
    "inverted-orbit", "recurrence", "sws-return",         "tau-probe",        "drift",
    "schreier",       "complexity", "colored-line-decay", "oracle-crosscheck"};

} // namespace

const char* kind_name(ExperimentKind k) { return kKindNames[static_cast<int>(k)]; }

ExperimentKind kind_from_name(const std::string& name) {
    for (int i = 0; i < 9; ++i)
        if (name == kKindNames[i]) return static_cast<ExperimentKind>(i);
    std::string all;
    for (int i = 0; i < 9; ++i) {
        if (i) all += ", ";
        all += kKindNames[i];
    }
    throw config_error("unknown experiment kind '" + name + "' (expected one of: " + all + ")");
}

int ExperimentConfig::gen_index(const std::string& name) const {
    for (std::size_t i = 0; i < gen_names.size(); ++i)
        if (gen_names[i] == name) return static_cast<int>(i);
    return -1;
}

Point ExperimentConfig::walk_base() const {
    if (!has_group) throw config_error("experiment has no [angles] section, so no base point");
    if (has_base) return point_parse(*group, base_text);
    return point_make(*group, 0);
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    cfg.raw_text = text;
    cfg.raw_hash = fnv1a64(text);

    std::vector<RawSection> sections = tokenize(text);

    const RawSection* experiment = nullptr;
    const RawSection* angles = nullptr;
    const RawSection* walk = nullptr;
    const RawSection* line = nullptr;
    const RawSection* probe = nullptr;
    std::vector<const RawSection*> generators;
    for (const RawSection& sec : sections) {
        auto unique = [&](const RawSection*& slot) {
            if (slot)
                fail_at(sec.line, 1, "duplicate [" + sec.name + "] section");
            if (!sec.arg.empty() && sec.name != "generator")
                fail_at(sec.line, 1, "[" + sec.name + "] takes no argument");
            slot = &sec;
        };
        if (sec.name == "experiment") unique(experiment);
        else if (sec.name == "angles") unique(angles);
        else if (sec.name == "walk") unique(walk);
        else if (sec.name == "line") unique(line);
        else if (sec.name == "probe") unique(probe);
        else if (sec.name == "generator") {
            if (!valid_name(sec.arg))
                fail_at(sec.line, 1, "[generator] needs a name: [generator a]");
            generators.push_back(&sec);
        } else
            fail_at(sec.line, 1, "unknown section [" + sec.name + "]");
    }

    if (!experiment) throw config_error("missing [experiment] section");
    {
        SectionReader r(*experiment);
        auto k = r.take("kind");
        if (!k) fail_at(experiment->line, 1, "[experiment] needs 'kind'");
        try {
            cfg.kind = kind_from_name(k->value);
        } catch (const config_error& err) {
            fail_at(k->line, k->col, err.what());
        }
        if (auto id = r.take("id")) {
            if (!valid_name(id->value))
                fail_at(id->line, id->col, "experiment id must be a plain name");
            cfg.id = id->value;
        } else {
            cfg.id = kind_name(cfg.kind);
        }
        r.done();
    }

    if (angles) {
        SectionReader r(*angles);
        if (auto m = r.take("m")) cfg.m = static_cast<long>(entry_int(*m, 1, 1'000'000));
        std::vector<RealEnclosure> theta, sigma;
        if (auto t = r.take("theta")) {
            for (const std::string& item : split_list(*t, ',')) {
                theta.push_back(enclosure_from(*t, item));
                cfg.theta_text.push_back(item);
            }
        }
        if (auto s = r.take("sigma")) {
            for (const std::string& item : split_list(*s, ',')) {
                sigma.push_back(enclosure_from(*s, item));
                cfg.sigma_text.push_back(item);
            }
        }
        if (sigma.empty()) {
            sigma.push_back(RealEnclosure::exact(0));
            cfg.sigma_text.push_back("0");
        }
        r.done();
        try {
            cfg.group = std::make_shared<AngleGroup>(cfg.m, std::move(theta), std::move(sigma));
        } catch (const config_error& err) {
            fail_at(angles->line, 1, err.what());
        }
        cfg.has_group = true;
    }

    for (const RawSection* g : generators) {
        if (!cfg.has_group)
            fail_at(g->line, 1, "[generator] sections need an [angles] section");
        if (cfg.gen_index(g->arg) >= 0)
            fail_at(g->line, 1, "duplicate generator name '" + g->arg + "'");
        SectionReader r(*g);
        auto map = r.take("map");
        if (!map) fail_at(g->line, 1, "[generator " + g->arg + "] needs 'map'");
        r.done();
        try {
            cfg.gens.push_back(iet_parse(*cfg.group, map->value));
        } catch (const config_error& err) {
            fail_at(map->line, map->col, err.what());
        }
        cfg.gen_names.push_back(g->arg);
    }

    if (walk) {
        cfg.has_walk = true;
        SectionReader r(*walk);
        if (auto m = r.take("measure")) {
            for (const std::string& item : split_list(*m, ',')) {
                std::size_t colon = item.find(':');
                if (colon == std::string::npos)
                    fail_at(m->line, m->col, "measure items look like 'name:1/4'");
                std::string name = trim(item.substr(0, colon));
                int idx = cfg.gen_index(name);
                if (idx < 0)
                    fail_at(m->line, m->col, "measure names unknown generator '" + name + "'");
                mpq_class w = entry_rational(*m, trim(item.substr(colon + 1)));
                if (w <= 0) fail_at(m->line, m->col, "generator weights must be positive");
                cfg.measure_index.push_back(idx);
                cfg.measure_weight.push_back(std::move(w));
            }
            mpq_class sum(0);
            for (const mpq_class& w : cfg.measure_weight) sum += w;
            if (sum != 1)
                fail_at(m->line, m->col,
                        "generator weights must sum to 1, got " + rational_str(sum));
        }
        if (auto b = r.take("base")) {
            if (!cfg.has_group)
                fail_at(b->line, b->col, "'base' needs an [angles] section");
            try {
                cfg.base_text = point_str(point_parse(*cfg.group, b->value));
            } catch (const config_error& err) {
                fail_at(b->line, b->col, err.what());
            }
            cfg.has_base = true;
        }
        if (auto h = r.take("horizon"))
            cfg.horizon = static_cast<long>(entry_int(*h, 1, 2'000'000'000));
        if (auto t = r.take("trajectories"))
            cfg.trajectories = entry_int(*t, 1, 1'000'000'000'000LL);
        if (auto s = r.take("seed")) {
            cfg.seed = entry_u64(*s);
            cfg.has_seed = true;
        }
        if (auto c = r.take("checkpoints")) {
            for (const std::string& item : split_list(*c, ','))
                cfg.checkpoints.push_back(
                    static_cast<long>(entry_int(RawEntry{c->key, item, c->line, c->col}, 1,
                                                2'000'000'000)));
        }
        if (auto e = r.take("epsilons")) {
            for (const std::string& item : split_list(*e, ',')) {
                double v = entry_double_item(*e, item);
                if (!(v > 0.0 && v < 1.0))
                    fail_at(e->line, e->col, "epsilons must lie in (0,1)");
                cfg.epsilons.push_back(v);
            }
        }
        r.done();
    }

    if (line) {
        cfg.has_line = true;
        SectionReader r(*line);
        auto s = r.take("seed");
        if (!s) fail_at(line->line, 1, "[line] needs 'seed' (the edge coloring seed)");
        cfg.line_seed = entry_u64(*s);
        if (auto w = r.take("word-budget"))
            cfg.word_budget = static_cast<int>(entry_int(*w, 0, 8));
        if (auto b = r.take("scan-budget"))
            cfg.scan_budget = entry_int(*b, 1, 1LL << 40);
        if (auto g = r.take("guard")) cfg.guard = entry_int(*g, 1, 1'000'000'000);
        r.done();
    }

    if (probe) {
        SectionReader r(*probe);
        if (auto s = r.take("samples")) cfg.samples = static_cast<long>(entry_int(*s, 1, 1'000'000));
        if (auto d = r.take("radius")) cfg.radius = static_cast<long>(entry_int(*d, 0, 64));
        if (auto n = r.take("n-max")) cfg.n_max = static_cast<long>(entry_int(*n, 1, 1'000'000));
        if (auto b = r.take("bases")) {
            for (const std::string& item : split_list(*b, ',')) {
                long v = static_cast<long>(entry_int(RawEntry{b->key, item, b->line, b->col}, 0,
                                                     1'000'000));
                if (cfg.has_group && v >= cfg.group->base_count())
                    fail_at(b->line, b->col, "base index " + item + " out of range");
                cfg.bases.push_back(static_cast<int>(v));
            }
        }
        if (auto c = r.take("cut-angles")) {
            if (!cfg.has_group)
                fail_at(c->line, c->col, "'cut-angles' needs an [angles] section");
            for (const std::string& item : split_list(*c, ';')) {
                try {
                    cfg.cut_angle_text.push_back(angle_str(angle_parse(*cfg.group, item)));
                } catch (const config_error& err) {
                    fail_at(c->line, c->col, err.what());
                }
            }
        }
        if (auto n = r.take("n")) cfg.oracle_n = static_cast<int>(entry_int(*n, 0, 64));
        if (auto b = r.take("budget")) cfg.oracle_budget = entry_int(*b, 1, 1LL << 50);
        r.done();
    }

    /* structural requirements per kind, checked up front so a bad config
       never starts computing */
    auto need = [&](bool ok, const std::string& what) {
        if (!ok)
            throw config_error(std::string(kind_name(cfg.kind)) + " experiment needs " + what);
    };
    bool walk_kind = false;
    switch (cfg.kind) {
    case ExperimentKind::inverted_orbit:
    case ExperimentKind::recurrence:
    case ExperimentKind::sws_return:
    case ExperimentKind::tau_probe:
    case ExperimentKind::drift:
        walk_kind = true;
        need(cfg.has_group, "an [angles] section");
        need(!cfg.gens.empty(), "at least one [generator]");
        need(!cfg.measure_index.empty(), "a [walk] measure");
        break;
    case ExperimentKind::schreier:
        need(cfg.has_group, "an [angles] section");
        need(!cfg.gens.empty(), "at least one [generator]");
        break;
    case ExperimentKind::complexity:
        need(cfg.has_group, "an [angles] section");
        need(!cfg.cut_angle_text.empty(), "[probe] cut-angles");
        break;
    case ExperimentKind::colored_line_decay:
        walk_kind = true;
        need(cfg.has_line, "a [line] section");
        break;
    case ExperimentKind::oracle_crosscheck:
        need(cfg.has_group, "an [angles] section");
        need(!cfg.gens.empty(), "at least one [generator]");
        need(!cfg.measure_index.empty(), "a [walk] measure");
        break;
    }
    if (walk_kind) {
        need(cfg.horizon >= 1, "[walk] horizon");
        need(cfg.trajectories >= 1, "[walk] trajectories");
        need(cfg.has_seed, "[walk] seed: stochastic runs take no implicit entropy");
    }
    for (long c : cfg.checkpoints)
        if (c > cfg.horizon)
            throw config_error("checkpoint " + std::to_string(c) + " exceeds the horizon");

    /* canonical rendering: fixed section and key order, values re-printed
       from the parsed objects, comments and spelling gone */
    std::ostringstream os;
    os << "[experiment]\n";
    os << "kind = " << kind_name(cfg.kind) << "\n";
    os << "id = " << cfg.id << "\n";
    if (cfg.has_group) {
        os << "[angles]\n";
        os << "m = " << cfg.m << "\n";
        if (!cfg.theta_text.empty()) {
            os << "theta = ";
            for (std::size_t i = 0; i < cfg.theta_text.size(); ++i)
                os << (i ? ", " : "") << cfg.theta_text[i];
            os << "\n";
        }
        os << "sigma = ";
        for (std::size_t i = 0; i < cfg.sigma_text.size(); ++i)
            os << (i ? ", " : "") << cfg.sigma_text[i];
        os << "\n";
    }
    for (std::size_t i = 0; i < cfg.gens.size(); ++i) {
        os << "[generator " << cfg.gen_names[i] << "]\n";
        os << "map = " << iet_str(cfg.gens[i]) << "\n";
    }
    if (cfg.has_walk) {
        os << "[walk]\n";
        if (!cfg.measure_index.empty()) {
            os << "measure = ";
            for (std::size_t i = 0; i < cfg.measure_index.size(); ++i)
                os << (i ? ", " : "")
                   << cfg.gen_names[static_cast<std::size_t>(cfg.measure_index[i])] << ":"
                   << rational_str(cfg.measure_weight[i]);
            os << "\n";
        }
        if (cfg.has_base) os << "base = " << cfg.base_text << "\n";
        if (cfg.horizon) os << "horizon = " << cfg.horizon << "\n";
        if (cfg.trajectories) os << "trajectories = " << cfg.trajectories << "\n";
        if (cfg.has_seed) os << "seed = " << cfg.seed << "\n";
        if (!cfg.checkpoints.empty()) {
            os << "checkpoints = ";
            for (std::size_t i = 0; i < cfg.checkpoints.size(); ++i)
                os << (i ? ", " : "") << cfg.checkpoints[i];
            os << "\n";
        }
        if (!cfg.epsilons.empty()) {
            os << "epsilons = ";
            for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", cfg.epsilons[i]);
                os << (i ? ", " : "") << buf;
            }
            os << "\n";
        }
    }
    if (cfg.has_line) {
        os << "[line]\n";
        os << "seed = " << cfg.line_seed << "\n";
        os << "word-budget = " << cfg.word_budget << "\n";
        os << "scan-budget = " << cfg.scan_budget << "\n";
        os << "guard = " << cfg.guard << "\n";
    }
    if (probe) {
        os << "[probe]\n";
        os << "samples = " << cfg.samples << "\n";
        os << "radius = " << cfg.radius << "\n";
        os << "n-max = " << cfg.n_max << "\n";
        if (!cfg.bases.empty()) {
            os << "bases = ";
            for (std::size_t i = 0; i < cfg.bases.size(); ++i)
                os << (i ? ", " : "") << cfg.bases[i];
            os << "\n";
        }
        if (!cfg.cut_angle_text.empty()) {
            os << "cut-angles = ";
            for (std::size_t i = 0; i < cfg.cut_angle_text.size(); ++i)
                os << (i ? " ; " : "") << cfg.cut_angle_text[i];
            os << "\n";
        }
        os << "n = " << cfg.oracle_n << "\n";
        os << "budget = " << cfg.oracle_budget << "\n";
    }
    cfg.canonical_text = os.str();
    cfg.canonical_hash = fnv1a64(cfg.canonical_text);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace iet
