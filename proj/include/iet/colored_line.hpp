#pragma once
#include "iet/errors.hpp"
#include "iet/rng.hpp"
#include "iet/stats.hpp"

#include <deque>
#include <functional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace iet {

/* Letters of the three order-two generators, in lexicographic order. */
inline constexpr const char* kLineLetters = "bry";

bool is_line_letter(char c);
bool is_reduced_word(const std::string& w);

/* w * c with the free-product reduction (c cancels a trailing c). */
std::string reduce_append(std::string w, char c);

/* Length-lex successor among reduced words ("" -> "b", "y" -> "br", ...). */
std::string next_reduced_word(const std::string& w);

/* Properly 3-colored line.  Edge e joins vertices e and e+1.  Colors are a
   pure function of (seed, edge): edge 0 is uniform over the three letters,
   every further edge uniform over the two letters distinct from its inner
   neighbour, so the coloring is proper and extending the cache in either
   direction never depends on query order.  Queries are safe from several
   threads; the cache is packed two bits per edge. */
class ColoredLine {
public:
    explicit ColoredLine(std::uint64_t seed);

    char color_at(long long edge) const;
    std::uint64_t seed() const { return seed_; }
    long long cached_lo() const; // inclusive edge range currently cached
    long long cached_hi() const;

private:
    int pick(long long edge, int forbidden) const;
    void extend_right(long long edge) const;
    void extend_left(long long edge) const;
    static int packed_get(const std::vector<std::uint64_t>& v, long long i);
    static void packed_push(std::vector<std::uint64_t>& v, long long i, int c);

    std::uint64_t seed_ = 0;
    mutable std::shared_mutex mu_;
    mutable std::vector<std::uint64_t> right_; // edges 0, 1, 2, ...
    mutable std::vector<std::uint64_t> left_;  // edges -1, -2, ... at index -1-e
    mutable long long right_count_ = 0;
    mutable long long left_count_ = 0;
};

/* The generator of colour c moves x across the adjacent edge of colour c
   (each vertex has at most one such edge, by properness) and fixes x when
   neither adjacent edge carries c.  An involution for every colour. */
long long free_action(const ColoredLine& line, char color, long long x);

/* w^{-1} * x: letters applied left to right (the group acts on the left, so
   the leftmost letter of w acts first in w^{-1} = a_l ... a_1 applied to x). */
long long word_inverse_apply(const ColoredLine& line, const std::string& w, long long x);

/* w * x: letters applied right to left. */
long long word_apply(const ColoredLine& line, const std::string& w, long long x);

/* One registered word: the guard pad (length 5|w|), the l+1 disjoint copies
   of pad+w+pad that were located, the vertex x_i between the first pad and w
   inside copy i, and the symmetric enclosing interval [-reach, reach].  The
   lamp configuration marks x_i + i for i = 0..l. */
struct MarkEntry {
    std::string word;
    std::string pad;
    std::vector<long long> copy_vertex; // x_0 < x_1 < ... < x_l
    long long reach = 0;
    long long scanned = 0; // edges examined to place the copies
};

/* Marked-point table for the distinguished lamp configuration.  Words are
   processed in length-lex order; each one scans the coloring rightward from
   the current frontier for |w|+1 non-overlapping copies of pad+w+pad, then
   pushes the frontier a guard gap past them, so marks of distinct words are
   disjoint and every value below the frontier is final.  The empty word gets
   the convention vertex 0 and no marks.  Locating copies of a word of length
   l costs about 2^(11l-1) edges per copy; the per-word scan budget makes the
   growth an explicit failure instead of a hang. */
class MarkRegistry {
public:
    explicit MarkRegistry(const ColoredLine& line,
                          long long word_scan_budget = (1ll << 27),
                          long long guard = 4096);

    /* Registers words in length-lex order until `word` is present.  Throws
       budget_error when some required word exceeds the scan budget. */
    const MarkEntry& entry_for(const std::string& word);
    void build_up_to_length(int len);

    const MarkEntry* find(const std::string& word) const; // no extension
    /* Final value of the configuration at vertex x; extends the registry
       until the frontier passes |x| when needed. */
    bool eval_f(long long x) const;
    bool eval_f_built(long long x) const; // never extends; x must be settled

    long long frontier() const;
    long long mark_count() const;
    std::vector<MarkEntry> entries() const;
    std::string audit_csv() const; // word,pad,copies,reach per entry

    /* Lex-first word of length 5|w| that keeps pad+w+pad reduced. */
    static std::string pad_for(const std::string& word);

private:
    void process_next_word() const;
    void ensure_settled(long long x) const;

    const ColoredLine* line_;
    long long budget_;
    long long guard_;
    mutable std::shared_mutex mu_;
    mutable std::deque<MarkEntry> entries_;
    mutable std::unordered_map<std::string, std::size_t> index_;
    mutable std::unordered_set<long long> marks_;
    mutable std::string cursor_;        // next word to process
    mutable long long frontier_ = 0;    // next search start; values below are final
};

/* State of the lamplighter walk with step law eta * nu * eta (eta flips the
   distinguished configuration with probability 1/2, nu is a uniform letter).
   The log keeps every coin with the group translate it acts through, which
   is enough to evaluate the configuration pointwise later. */
struct LampRecord {
    std::string shift; // reduced word w such that the record contributes f(w^{-1} x)
    bool applied = false;
};

struct HWalkState {
    std::string w; // reduced position word, leftmost letter oldest
    std::vector<LampRecord> lamp_log;
    long steps = 0;
};

void h_walk_step(HWalkState& s, SplitMix64& rng);

/* Configuration after `s.steps` steps, at vertex x, over the base
   configuration `base` (identically zero when absent). */
int eval_t_n(const HWalkState& s, const ColoredLine& line, const MarkRegistry& reg,
             long long x, const std::function<int(long long)>& base = {});

/* Agreement-decay estimator: at each checkpoint n, the fraction of
   trajectories whose configuration matches the base at each distinguished
   vertex x_0, ..., x_l of the current position word (the marks themselves sit
   at x_i + i; the walk reads the values at x_i).  Words beyond the budget count as
   disagreement (censored, reported); the empty word is reported separately
   through its convention vertex. */
struct DecaySpec {
    long horizon = 40;
    long long trajectories = 0;
    std::uint64_t seed = 0;
    std::vector<long> checkpoints; // default: horizon only
    int threads = 1;
    long long block_size = 64;
    int word_budget = 2; // longest word looked up in the registry
};

struct DecayRow {
    long n = 0;
    long long total = 0;    // trajectories with a nonempty position word
    long long agree = 0;
    long long censored = 0; // beyond the word budget, counted in total as disagree
    long long empty = 0;
    long long empty_agree = 0;
    double agree_freq = 0.0;
    double agree_stderr = 0.0;
    double rate = 0.0;      // -(1/n) log agree_freq
    double rate_lo99 = 0.0; // one-sided 99% lower confidence bound for the rate
};

struct DecayReport {
    std::vector<DecayRow> rows;
    long horizon = 0;
    long long trajectories = 0;
    std::uint64_t seed = 0;
    int word_budget = 0;
};

DecayReport decay_estimate(const ColoredLine& line, MarkRegistry& reg, const DecaySpec& spec);

/* Conditional mark-vector test: among trajectories of length n with position
   word exactly `word`, the bits (t_n(x_0), ..., t_n(x_l)) are binned into
   2^(l+1) cells and tested against the uniform law. */
struct MarkVectorTest {
    std::string word;
    long n = 0;
    long long samples = 0;
    long long attempts = 0;
    std::vector<long long> cell_count;
    double statistic = 0.0;
    double p_value = 1.0;
};

MarkVectorTest conditional_mark_test(const ColoredLine& line, MarkRegistry& reg,
                                     const std::string& word, long n,
                                     long long target_samples, std::uint64_t seed,
                                     long long max_attempts);

/* Exact laws of the driving chains.  The position-word length under nu is the
   radial chain on Z>=0 stepping +1 with probability 2/3 and -1 with 1/3 away
   from 0, and 0 -> 1 surely. */
std::vector<mpq_class> free_return_dp(int n);    // P(w_k = e) for k = 0..n
std::vector<double> mean_word_length_dp(long n); // E|w_k| for k = 0..n

/* Point walk on the line under nu: whatever the proper coloring, each vertex
   moves left / stays / moves right with probability 1/3 each, so the first
   return law is that of the lazy simple walk.  Returns P(T <= k), k = 0..n. */
std::vector<mpq_class> line_return_dp(int n);

/* Top eigenvalue of the radial chain killed outside [0, radius]: the limit of
   the even-step return-probability ratio of the ball-confined walk, a fast-
   converging estimator of the spectral radius. */
double killed_ball_rate(int radius, int iterations = 2000);

} // namespace iet
