#pragma once

// Deterministic random sampling and least-squares slope fitting shared by
// the geometry suite, the decay scans and the experiment runner.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace ws {

/// mt19937_64 with a portable uniform-double conversion, so seeded runs
/// are byte-reproducible across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller on portable uniforms.
    double normal();

    /// Derives an independent stream for a labelled sub-task.
    Rng fork(std::uint64_t label) const;

  private:
    std::mt19937_64 gen_;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
/// Throws std::domain_error with fewer than 3 points.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Fits log|y| = p log x + c over the samples with x in [x_lo, x_hi] and
/// |y| above the floor; returns the exponent p. Throws std::domain_error
/// when fewer than 3 samples survive.
double fit_loglog_exponent(const std::vector<double>& x, const std::vector<double>& y,
                           double x_lo, double x_hi, double y_floor = 1e-280);

}  // namespace ws
