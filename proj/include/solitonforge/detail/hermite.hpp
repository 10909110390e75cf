#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace solitonforge::detail {

// Cubic Hermite segment on [x0, x1] with endpoint values y0, y1 and endpoint
// slopes d0, d1. The basis is evaluated so that value(x0) == y0,
// value(x1) == y1, deriv(x0) == d0 and deriv(x1) == d1 hold bit-for-bit.
struct HermiteSegment {
    double x0, x1, y0, y1, d0, d1;

    double value(double x) const {
        const double h = x1 - x0;
        const double t = (x - x0) / h;
        const double omt = 1.0 - t;
        const double h00 = (1.0 + 2.0 * t) * omt * omt;
        const double h10 = t * omt * omt;
        const double h01 = t * t * (3.0 - 2.0 * t);
        const double h11 = t * t * (t - 1.0);
        return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    }

    // Analytic derivative of value(); at the endpoints this reproduces the
    // stored slopes exactly, so value/deriv pairs stay mutually consistent.
    // Written against the secant slope (y1-y0)/h: the textbook grouping
    // (h00' y0 + h01' y1)/h cancels catastrophically when y0 ~ y1.
    double deriv(double x) const {
        const double h = x1 - x0;
        const double t = (x - x0) / h;
        const double secant = (y1 - y0) / h;
        return 6.0 * t * (1.0 - t) * secant +
               (1.0 - t) * (1.0 - 3.0 * t) * d0 + t * (3.0 * t - 2.0) * d1;
    }

    double second(double x) const {
        const double h = x1 - x0;
        const double t = (x - x0) / h;
        const double secant = (y1 - y0) / h;
        return ((6.0 - 12.0 * t) * secant + (6.0 * t - 4.0) * d0 +
                (6.0 * t - 2.0) * d1) /
               h;
    }
};

// Index of the segment [x_i, x_{i+1}] containing x; assumes x within range
// and xs strictly increasing with at least two nodes.
inline std::size_t segment_index(const std::vector<double>& xs, double x) {
    std::size_t lo = 0, hi = xs.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (xs[mid] <= x)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

inline HermiteSegment segment_for(const std::vector<double>& xs,
                                  const std::vector<double>& ys,
                                  const std::vector<double>& ds, double x) {
    const std::size_t i = segment_index(xs, x);
    return HermiteSegment{xs[i], xs[i + 1], ys[i], ys[i + 1], ds[i], ds[i + 1]};
}

} // namespace solitonforge::detail
