#ifndef CARNOT_FITTING_HPP
#define CARNOT_FITTING_HPP

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace carnot {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least-squares line through (x,y) pairs, optionally in log-log space.
inline LineFit fit_exponent(const std::vector<std::pair<double, double>>& points, bool log_log) {
    if (points.size() < 3) throw std::invalid_argument("fit_exponent: need at least 3 points");
    std::vector<double> xs, ys;
    for (auto [x, y] : points) {
        if (log_log) {
            if (x <= 0.0 || y <= 0.0)
                throw std::invalid_argument("fit_exponent: log-log needs positive data");
            xs.push_back(std::log(x));
            ys.push_back(std::log(y));
        } else {
            xs.push_back(x);
            ys.push_back(y);
        }
    }
    size_t n = xs.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) { mx += xs[i]; my += ys[i]; }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx < 1e-300) throw std::invalid_argument("fit_exponent: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = (syy < 1e-300) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

} // namespace carnot

#endif
