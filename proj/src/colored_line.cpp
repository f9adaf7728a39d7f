#include "iet/colored_line.hpp"
#include "iet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace iet {

bool is_line_letter(char c) { return c == 'b' || c == 'r' || c == 'y'; }

bool is_reduced_word(const std::string& w) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!is_line_letter(w[i])) return false;
        if (i > 0 && w[i] == w[i - 1]) return false;
    }
    return true;
}

std::string reduce_append(std::string w, char c) {
    if (!is_line_letter(c)) throw config_error("not a generator letter: " + std::string(1, c));
    if (!w.empty() && w.back() == c)
        w.pop_back();
    else
        w.push_back(c);
    return w;
}

namespace {

/* lex-first reduced word of a given length: b r b r b r ... */
std::string first_reduced_word(std::size_t len) {
    std::string w;
    w.reserve(len);
    for (std::size_t i = 0; i < len; ++i) w.push_back(i % 2 ? 'r' : 'b');
    return w;
}

char min_letter_not(char forbidden) { return forbidden == 'b' ? 'r' : 'b'; }

} // namespace

std::string next_reduced_word(const std::string& w) {
    if (!is_reduced_word(w)) throw config_error("not a reduced word: " + w);
    std::string s = w;
    for (int i = static_cast<int>(s.size()) - 1; i >= 0; --i) {
        for (const char* c = kLineLetters; *c; ++c) {
            if (*c <= s[i]) continue;
            if (i > 0 && *c == s[i - 1]) continue;
            s[i] = *c;
            for (std::size_t j = i + 1; j < s.size(); ++j) s[j] = min_letter_not(s[j - 1]);
            return s;
        }
    }
    return first_reduced_word(w.size() + 1);
}

/* ---- the colored line ---- */

ColoredLine::ColoredLine(std::uint64_t seed) : seed_(mix64(seed + 0x9e3779b97f4a7c15ULL)) {}

int ColoredLine::packed_get(const std::vector<std::uint64_t>& v, long long i) {
    return static_cast<int>((v[static_cast<std::size_t>(i >> 5)] >> ((i & 31) * 2)) & 3);
}

void ColoredLine::packed_push(std::vector<std::uint64_t>& v, long long i, int c) {
    if ((i & 31) == 0) v.push_back(0);
    v[static_cast<std::size_t>(i >> 5)] |= static_cast<std::uint64_t>(c) << ((i & 31) * 2);
}

int ColoredLine::pick(long long edge, int forbidden) const {
    std::uint64_t u = edge >= 0 ? 2ull * static_cast<std::uint64_t>(edge)
                                : 2ull * static_cast<std::uint64_t>(-(edge + 1)) + 1;
    std::uint64_t r = mix64(seed_ ^ mix64(u));
    if (forbidden < 0) return static_cast<int>(r % 3);
    int low = forbidden == 0 ? 1 : 0;
    int high = forbidden == 2 ? 1 : 2;
    return (r & 1) ? high : low;
}

void ColoredLine::extend_right(long long edge) const {
    while (right_count_ <= edge) {
        int prev = right_count_ == 0 ? -1 : packed_get(right_, right_count_ - 1);
        packed_push(right_, right_count_, pick(right_count_, prev));
        ++right_count_;
    }
}

void ColoredLine::extend_left(long long edge) const {
    if (right_count_ == 0) extend_right(0); // edge -1 is colored relative to edge 0
    while (-left_count_ - 1 >= edge) {
        long long e = -left_count_ - 1;
        int inner = e == -1 ? packed_get(right_, 0) : packed_get(left_, left_count_ - 1);
        packed_push(left_, left_count_, pick(e, inner));
        ++left_count_;
    }
}

char ColoredLine::color_at(long long edge) const {
    {
        std::shared_lock<std::shared_mutex> lk(mu_);
        if (edge >= 0 && edge < right_count_) return kLineLetters[packed_get(right_, edge)];
        if (edge < 0 && -edge <= left_count_) return kLineLetters[packed_get(left_, -edge - 1)];
    }
    std::unique_lock<std::shared_mutex> lk(mu_);
    if (edge >= 0) {
        extend_right(edge);
        return kLineLetters[packed_get(right_, edge)];
    }
    extend_left(edge);
    return kLineLetters[packed_get(left_, -edge - 1)];
}

long long ColoredLine::cached_lo() const {
    std::shared_lock<std::shared_mutex> lk(mu_);
    return -left_count_;
}

long long ColoredLine::cached_hi() const {
    std::shared_lock<std::shared_mutex> lk(mu_);
    return right_count_ - 1;
}

long long free_action(const ColoredLine& line, char color, long long x) {
    if (!is_line_letter(color)) throw config_error("not a generator letter: " + std::string(1, color));
    if (line.color_at(x) == color) return x + 1;
    if (line.color_at(x - 1) == color) return x - 1;
    return x;
}

long long word_inverse_apply(const ColoredLine& line, const std::string& w, long long x) {
    for (char c : w) x = free_action(line, c, x);
    return x;
}

long long word_apply(const ColoredLine& line, const std::string& w, long long x) {
    for (auto it = w.rbegin(); it != w.rend(); ++it) x = free_action(line, *it, x);
    return x;
}

/* ---- mark registry ---- */

MarkRegistry::MarkRegistry(const ColoredLine& line, long long word_scan_budget, long long guard)
    : line_(&line), budget_(word_scan_budget), guard_(guard) {
    if (word_scan_budget < 1) throw config_error("scan budget must be positive");
    if (guard < 64) throw config_error("guard gap too small to keep settled values final");
    frontier_ = guard_;
}

std::string MarkRegistry::pad_for(const std::string& word) {
    if (!is_reduced_word(word)) throw config_error("not a reduced word: " + word);
    if (word.empty()) return "";
    std::size_t len = 5 * word.size();
    std::string pad;
    pad.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
        for (const char* c = kLineLetters; *c; ++c) {
            if (i == 0 && *c == word.back()) continue;        // second pad follows the word
            if (i > 0 && *c == pad[i - 1]) continue;
            if (i == len - 1 && *c == word.front()) continue; // first pad precedes the word
            pad.push_back(*c);
            break;
        }
    }
    return pad; // three letters always leave a choice, so the greedy pick never fails
}

void MarkRegistry::process_next_word() const {
    std::string w = cursor_;
    cursor_ = next_reduced_word(w);
    long long l = static_cast<long long>(w.size());

    MarkEntry entry;
    entry.word = w;
    if (l == 0) {
        entry.copy_vertex = {0}; // convention vertex for the identity; no marks
        entry.reach = guard_;
    } else {
        entry.pad = pad_for(w);
        std::string pattern = entry.pad + w + entry.pad;
        long long plen = static_cast<long long>(pattern.size());

        std::vector<int> pi(pattern.size(), 0);
        for (std::size_t i = 1; i < pattern.size(); ++i) {
            int k = pi[i - 1];
            while (k > 0 && pattern[i] != pattern[k]) k = pi[k - 1];
            if (pattern[i] == pattern[k]) ++k;
            pi[i] = k;
        }

        long long needed = l + 1;
        long long e = frontier_;
        int matched = 0;
        while (static_cast<long long>(entry.copy_vertex.size()) < needed) {
            if (e - frontier_ >= budget_) {
                std::ostringstream m;
                m << "mark search for word '" << w << "' found "
                  << entry.copy_vertex.size() << " of " << needed
                  << " pattern copies within the scan budget of " << budget_ << " edges";
                throw budget_error(m.str());
            }
            if ((e & 0xFFFF) == 0) line_->color_at(e + 0xFFFF); // extend the cache in bulk
            char c = line_->color_at(e);
            while (matched > 0 && pattern[matched] != c) matched = pi[matched - 1];
            if (pattern[matched] == c) ++matched;
            if (matched == plen) {
                entry.copy_vertex.push_back(e - plen + 1 + 5 * l); // vertex between pad and word
                matched = 0;                                       // keep copies disjoint
            }
            ++e;
        }
        entry.scanned = e - frontier_;
        for (long long i = 0; i <= l; ++i) marks_.insert(entry.copy_vertex[i] + i);
        frontier_ = entry.copy_vertex.back() + 6 * l + guard_; // past the copy's trailing pad
        entry.reach = frontier_;
    }
    index_[entry.word] = entries_.size();
    entries_.push_back(std::move(entry));
}

const MarkEntry& MarkRegistry::entry_for(const std::string& word) {
    if (!is_reduced_word(word)) throw config_error("not a reduced word: " + word);
    std::unique_lock<std::shared_mutex> lk(mu_);
    while (!index_.count(word)) process_next_word();
    return entries_[index_.at(word)];
}

void MarkRegistry::build_up_to_length(int len) {
    std::unique_lock<std::shared_mutex> lk(mu_);
    while (static_cast<int>(cursor_.size()) <= len) process_next_word();
}

const MarkEntry* MarkRegistry::find(const std::string& word) const {
    std::shared_lock<std::shared_mutex> lk(mu_);
    auto it = index_.find(word);
    return it == index_.end() ? nullptr : &entries_[it->second];
}

bool MarkRegistry::eval_f(long long x) const {
    {
        std::shared_lock<std::shared_mutex> lk(mu_);
        if (x < frontier_) return marks_.count(x) != 0;
    }
    std::unique_lock<std::shared_mutex> lk(mu_);
    while (x >= frontier_) process_next_word();
    return marks_.count(x) != 0;
}

bool MarkRegistry::eval_f_built(long long x) const {
    std::shared_lock<std::shared_mutex> lk(mu_);
    if (x >= frontier_)
        throw std::logic_error("configuration queried beyond the built frontier");
    return marks_.count(x) != 0;
}

long long MarkRegistry::frontier() const {
    std::shared_lock<std::shared_mutex> lk(mu_);
    return frontier_;
}

long long MarkRegistry::mark_count() const {
    std::shared_lock<std::shared_mutex> lk(mu_);
    return static_cast<long long>(marks_.size());
}

std::vector<MarkEntry> MarkRegistry::entries() const {
    std::shared_lock<std::shared_mutex> lk(mu_);
    return std::vector<MarkEntry>(entries_.begin(), entries_.end());
}

std::string MarkRegistry::audit_csv() const {
    std::shared_lock<std::shared_mutex> lk(mu_);
    std::ostringstream out;
    out << "word,pad,copy_vertices,reach,scanned\n";
    for (const auto& en : entries_) {
        out << (en.word.empty() ? "e" : en.word) << "," << en.pad << ",";
        for (std::size_t i = 0; i < en.copy_vertex.size(); ++i)
            out << (i ? ";" : "") << en.copy_vertex[i];
        out << "," << en.reach << "," << en.scanned << "\n";
    }
    return out.str();
}

/* ---- lamplighter walk ---- */

void h_walk_step(HWalkState& s, SplitMix64& rng) {
    bool eps1 = rng.below(2) != 0;
    char letter = kLineLetters[rng.below(3)];
    bool eps2 = rng.below(2) != 0;
    s.lamp_log.push_back({s.w, eps1});
    s.w = reduce_append(std::move(s.w), letter);
    s.lamp_log.push_back({s.w, eps2});
    ++s.steps;
}

int eval_t_n(const HWalkState& s, const ColoredLine& line, const MarkRegistry& reg,
             long long x, const std::function<int(long long)>& base) {
    int acc = base ? (base(word_inverse_apply(line, s.w, x)) & 1) : 0;
    for (const auto& rec : s.lamp_log)
        if (rec.applied) acc ^= reg.eval_f(word_inverse_apply(line, rec.shift, x)) ? 1 : 0;
    return acc;
}

/* ---- agreement decay ---- */

namespace {

struct DecayCounts {
    long long total = 0, agree = 0, censored = 0, empty = 0, empty_agree = 0;
};

struct DecayPartial {
    std::vector<DecayCounts> at;

    void init(std::size_t n) {
        if (at.empty()) at.resize(n);
    }
    void merge(const DecayPartial& o) {
        if (o.at.empty()) return;
        init(o.at.size());
        for (std::size_t i = 0; i < at.size(); ++i) {
            at[i].total += o.at[i].total;
            at[i].agree += o.at[i].agree;
            at[i].censored += o.at[i].censored;
            at[i].empty += o.at[i].empty;
            at[i].empty_agree += o.at[i].empty_agree;
        }
    }
};

void check_decay_spec(DecaySpec& spec) {
    if (spec.horizon < 1) throw config_error("horizon must be at least 1");
    if (spec.trajectories < 1) throw config_error("trajectory budget must be at least 1");
    if (spec.threads < 1) throw config_error("thread count must be at least 1");
    if (spec.block_size < 1) throw config_error("block size must be at least 1");
    if (spec.word_budget < 1) throw config_error("word budget must be at least 1");
    if (spec.checkpoints.empty()) spec.checkpoints = {spec.horizon};
    std::sort(spec.checkpoints.begin(), spec.checkpoints.end());
    spec.checkpoints.erase(std::unique(spec.checkpoints.begin(), spec.checkpoints.end()),
                           spec.checkpoints.end());
    if (spec.checkpoints.front() < 1 || spec.checkpoints.back() > spec.horizon)
        throw config_error("checkpoints must lie in [1, horizon]");
}

} // namespace

DecayReport decay_estimate(const ColoredLine& line, MarkRegistry& reg, const DecaySpec& spec_in) {
    DecaySpec spec = spec_in;
    check_decay_spec(spec);
    reg.build_up_to_length(spec.word_budget); // all lookups below stay read-only

    const auto& ck = spec.checkpoints;
    DecayPartial agg = run_blocks<DecayPartial>(
        spec.trajectories, spec.threads, spec.block_size,
        [&](long long idx, DecayPartial& part) {
            part.init(ck.size());
            SplitMix64 rng = stream_for(spec.seed, static_cast<std::uint64_t>(idx));
            HWalkState st;
            std::size_t next = 0;
            for (long step = 1; step <= spec.horizon && next < ck.size(); ++step) {
                h_walk_step(st, rng);
                if (step != ck[next]) continue;
                DecayCounts& c = part.at[next++];
                if (st.w.empty()) {
                    ++c.empty;
                    if (eval_t_n(st, line, reg, 0) == 0) ++c.empty_agree;
                } else if (static_cast<int>(st.w.size()) > spec.word_budget) {
                    ++c.total;
                    ++c.censored;
                } else {
                    const MarkEntry* en = reg.find(st.w);
                    if (!en) throw std::logic_error("registry missing a budgeted word");
                    ++c.total;
                    bool ok = true;
                    for (long long v : en->copy_vertex)
                        if (eval_t_n(st, line, reg, v) != 0) {
                            ok = false;
                            break;
                        }
                    if (ok) ++c.agree;
                }
            }
        });

    DecayReport rep;
    rep.horizon = spec.horizon;
    rep.trajectories = spec.trajectories;
    rep.seed = spec.seed;
    rep.word_budget = spec.word_budget;
    for (std::size_t i = 0; i < ck.size(); ++i) {
        const DecayCounts& c = agg.at[i];
        DecayRow row;
        row.n = ck[i];
        row.total = c.total;
        row.agree = c.agree;
        row.censored = c.censored;
        row.empty = c.empty;
        row.empty_agree = c.empty_agree;
        double f = c.total ? static_cast<double>(c.agree) / static_cast<double>(c.total) : 0.0;
        row.agree_freq = f;
        row.agree_stderr = c.total ? std::sqrt(f * (1.0 - f) / static_cast<double>(c.total)) : 0.0;
        row.rate = f > 0 ? -std::log(f) / static_cast<double>(row.n)
                         : std::numeric_limits<double>::infinity();
        double hi = c.agree == 0 ? 4.60517018598809 / std::max<double>(1.0, c.total)
                                 : std::min(1.0, f + 2.32634787404084 * row.agree_stderr);
        row.rate_lo99 = -std::log(hi) / static_cast<double>(row.n);
        rep.rows.push_back(row);
    }
    return rep;
}

MarkVectorTest conditional_mark_test(const ColoredLine& line, MarkRegistry& reg,
                                     const std::string& word, long n,
                                     long long target_samples, std::uint64_t seed,
                                     long long max_attempts) {
    if (word.empty())
        throw config_error("conditional mark test needs a nonempty word "
                           "(the identity has only the convention vertex)");
    if (n < 1 || target_samples < 1 || max_attempts < 1)
        throw config_error("conditional mark test needs positive n, samples and attempts");
    const MarkEntry entry = reg.entry_for(word); // may raise the scan budget error

    MarkVectorTest t;
    t.word = word;
    t.n = n;
    int bits = static_cast<int>(word.size()) + 1;
    t.cell_count.assign(1ull << bits, 0);
    while (t.samples < target_samples && t.attempts < max_attempts) {
        SplitMix64 rng = stream_for(seed, static_cast<std::uint64_t>(t.attempts));
        ++t.attempts;
        HWalkState st;
        for (long step = 0; step < n; ++step) h_walk_step(st, rng);
        if (st.w != word) continue;
        std::size_t cell = 0;
        for (int i = 0; i < bits; ++i)
            if (eval_t_n(st, line, reg, entry.copy_vertex[i]))
                cell |= std::size_t{1} << i;
        ++t.cell_count[cell];
        ++t.samples;
    }
    if (t.samples > 0) {
        double expect = static_cast<double>(t.samples) / static_cast<double>(t.cell_count.size());
        for (long long c : t.cell_count) {
            double d = static_cast<double>(c) - expect;
            t.statistic += d * d / expect;
        }
        t.p_value = chi_square_sf(t.statistic, static_cast<int>(t.cell_count.size()) - 1);
    }
    return t;
}

/* ---- exact chains ---- */

std::vector<mpq_class> free_return_dp(int n) {
    if (n < 0) throw config_error("horizon must be nonnegative");
    std::vector<mpq_class> p(n + 1), q(n + 1);
    p[0] = 1;
    std::vector<mpq_class> out(n + 1);
    out[0] = 1;
    const mpq_class up(2, 3), down(1, 3);
    for (int k = 1; k <= n; ++k) {
        for (auto& v : q) v = 0;
        for (int l = 0; l < k; ++l) {
            if (p[l] == 0) continue;
            if (l == 0) {
                q[1] += p[0];
            } else {
                q[l + 1] += p[l] * up;
                q[l - 1] += p[l] * down;
            }
        }
        p.swap(q);
        out[k] = p[0];
    }
    return out;
}

std::vector<double> mean_word_length_dp(long n) {
    if (n < 0) throw config_error("horizon must be nonnegative");
    std::vector<double> p(n + 1, 0.0), q(n + 1, 0.0), out(n + 1, 0.0);
    p[0] = 1.0;
    for (long k = 1; k <= n; ++k) {
        std::fill(q.begin(), q.begin() + k + 1, 0.0);
        for (long l = 0; l < k; ++l) {
            if (p[l] == 0.0) continue;
            if (l == 0) {
                q[1] += p[0];
            } else {
                q[l + 1] += p[l] * (2.0 / 3.0);
                q[l - 1] += p[l] / 3.0;
            }
        }
        p.swap(q);
        double mean = 0.0;
        for (long l = 1; l <= k; ++l) mean += static_cast<double>(l) * p[l];
        out[k] = mean;
    }
    return out;
}

std::vector<mpq_class> line_return_dp(int n) {
    if (n < 0) throw config_error("horizon must be nonnegative");
    std::vector<mpq_class> out(n + 1);
    if (n == 0) return out;
    long long width = 2 * static_cast<long long>(n) + 1;
    std::vector<mpq_class> s(width), ns(width); // alive mass; index x + n, s[n] stays 0
    const mpq_class third(1, 3);
    s[n - 1] = third;
    s[n + 1] = third;
    out[1] = third;
    for (int k = 2; k <= n; ++k) {
        for (auto& v : ns) v = 0;
        for (long long i = n - k; i <= n + k; ++i) {
            mpq_class m = (i > 0 ? s[i - 1] : mpq_class(0)) + s[i] +
                          (i + 1 < width ? s[i + 1] : mpq_class(0));
            ns[i] = m * third;
        }
        out[k] = out[k - 1] + ns[n];
        ns[n] = 0;
        s.swap(ns);
    }
    return out;
}

double killed_ball_rate(int radius, int iterations) {
    if (radius < 2) throw config_error("radius must be at least 2");
    std::vector<double> v(radius + 1, 0.0), w(radius + 1, 0.0);
    v[0] = 1.0;
    auto step = [&](std::vector<double>& a, std::vector<double>& b) {
        std::fill(b.begin(), b.end(), 0.0);
        b[1] += a[0];
        for (int l = 1; l <= radius; ++l) {
            if (a[l] == 0.0) continue;
            if (l + 1 <= radius) b[l + 1] += a[l] * (2.0 / 3.0); // outward mass at the rim dies
            b[l - 1] += a[l] / 3.0;
        }
    };
    double ratio = 0.0;
    for (int it = 0; it < iterations; ++it) {
        step(v, w);
        step(w, v); // two steps keep the mass on the even-distance sublattice
        ratio = v[0];
        double scale = 1.0 / v[0];
        for (auto& x : v) x *= scale;
    }
    return std::sqrt(ratio);
}

} // namespace iet
