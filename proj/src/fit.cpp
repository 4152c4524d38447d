#include "wedgescatter/fit.hpp"

#include <cmath>

namespace ws {

double Rng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Rng Rng::fork(std::uint64_t label) const {
    Rng copy = *this;
    std::uint64_t x = copy.gen_() ^ (0x9e3779b97f4a7c15ULL * (label + 1));
    // splitmix64 scramble so sibling streams decorrelate
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x = x ^ (x >> 31);
    return Rng(x);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw std::domain_error("fit_line: need at least 3 samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::domain_error("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

double fit_loglog_exponent(const std::vector<double>& x, const std::vector<double>& y,
                           double x_lo, double x_hi, double y_floor) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_loglog_exponent: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < x_lo || x[i] > x_hi || x[i] <= 0.0) continue;
        const double a = std::abs(y[i]);
        if (a < y_floor) continue;
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(a));
    }
    if (lx.size() < 3) throw std::domain_error("fit_loglog_exponent: fewer than 3 usable samples");
    return fit_line(lx, ly).slope;
}

}  // namespace ws
