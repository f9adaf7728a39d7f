#pragma once
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace iet {

/* log-space accumulator for sums of tiny terms exp(l_i): keeps the running
   maximum exponent and a rescaled mantissa sum.  Merging two accumulators is
   associative enough for our use but NOT commutative bit-for-bit, so callers
   must always merge in a fixed order (the block runner guarantees that). */
struct LogSum {
    double max_log = -std::numeric_limits<double>::infinity();
    double mantissa = 0.0; // sum of exp(l_i - max_log)

    void add(double l) {
        if (l <= max_log) {
            mantissa += std::exp(l - max_log);
        } else {
            mantissa = mantissa * std::exp(max_log - l) + 1.0;
            max_log = l;
        }
    }

    void merge(const LogSum& o) {
        if (o.mantissa == 0.0) return;
        if (mantissa == 0.0) {
            *this = o;
            return;
        }
        if (o.max_log <= max_log) {
            mantissa += o.mantissa * std::exp(o.max_log - max_log);
        } else {
            mantissa = mantissa * std::exp(max_log - o.max_log) + o.mantissa;
            max_log = o.max_log;
        }
    }

    // log of the accumulated sum
    double log_total() const {
        if (mantissa == 0.0) return -std::numeric_limits<double>::infinity();
        return max_log + std::log(mantissa);
    }

    double log_mean(long long count) const {
        return log_total() - std::log(static_cast<double>(count));
    }
};

/* plain first/second moment accumulator; merge by addition */
struct MeanVar {
    double sum = 0.0;
    double sum_sq = 0.0;
    long long n = 0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    void merge(const MeanVar& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        n += o.n;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double variance() const {
        if (n < 2) return 0.0;
        double m = mean();
        double v = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        return v > 0.0 ? v : 0.0;
    }
    double stderr_mean() const {
        return n ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }
};

// binomial proportion and its standard error
inline double proportion_stderr(double p, long long n) {
    if (n <= 0) return 0.0;
    double v = p * (1.0 - p) / static_cast<double>(n);
    return v > 0.0 ? std::sqrt(v) : 0.0;
}

// upper tail of the chi-square distribution
double chi_square_sf(double statistic, int dof);

/* least squares fit y = a + b x; returns slope, intercept and the standard
   error of the slope */
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace iet
