#include "solitonforge/quadrature.hpp"
#include "solitonforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

namespace solitonforge {

namespace {

// 15-point Kronrod abscissae/weights with the embedded 7-point Gauss rule
// (QUADPACK QK15 values).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
    double a, b, value, error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

Interval gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double result_gauss = kWg[3] * fc;
    double result_kronrod = kWgk[7] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        result_kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1)
            result_gauss += kWg[j / 2] * (f1 + f2);
    }
    const double value = result_kronrod * h;
    const double err = std::abs((result_kronrod - result_gauss) * h);
    return Interval{a, b, value, err};
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol, int max_intervals) {
    if (a == b)
        return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }

    std::priority_queue<Interval> queue;
    queue.push(gk15(f, a, b));
    double total = queue.top().value;
    double total_err = queue.top().error;

    int n = 1;
    while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (n >= max_intervals) {
            std::ostringstream msg;
            msg << "quadrature failed to converge on [" << a << ", " << b
                << "]: estimate " << sign * total << ", error estimate "
                << total_err << " after " << n << " intervals";
            throw AccuracyError(msg.str());
        }
        Interval worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Interval left = gk15(f, worst.a, mid);
        Interval right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        ++n;
    }
    return sign * total;
}

} // namespace solitonforge
