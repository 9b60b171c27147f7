#pragma once

// Independent reference computations shared by the unit tests. None of these
// call into the library.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

// 2F1(a, b; c; z) by direct summation in long double.
inline long double hyp2f1(long double a, long double b, long double c, long double z) {
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int k = 0; k < 200000; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z;
        sum += term;
        if (std::fabs(term) < 1e-21L * std::fabs(sum) && k > 4) break;
    }
    return sum;
}

// P_{1/2}(t) = 2F1(-1/2, 3/2; 1; (1 - t)/2) and its t-derivative.
inline std::pair<double, double> legendre_half(double t) {
    const long double z = (1.0L - t) / 2.0L;
    const long double v = hyp2f1(-0.5L, 1.5L, 1.0L, z);
    const long double dz = (-0.5L * 1.5L) * hyp2f1(0.5L, 2.5L, 2.0L, z);
    return {static_cast<double>(v), static_cast<double>(-0.5L * dz)};
}

// Classical RK4 on the Legendre ODE (1 - t^2) P'' - 2 t P' + 3/4 P = 0,
// started at t0 from series data and marched to t1.
inline double legendre_ode(double t0, double t1, int steps) {
    auto [p, dp] = legendre_half(t0);
    const double h = (t1 - t0) / steps;
    auto rhs = [](double t, double y, double dy) { return (2.0 * t * dy - 0.75 * y) / (1.0 - t * t); };
    double t = t0;
    for (int s = 0; s < steps; ++s) {
        const double k1y = dp, k1d = rhs(t, p, dp);
        const double k2y = dp + 0.5 * h * k1d, k2d = rhs(t + 0.5 * h, p + 0.5 * h * k1y, dp + 0.5 * h * k1d);
        const double k3y = dp + 0.5 * h * k2d, k3d = rhs(t + 0.5 * h, p + 0.5 * h * k2y, dp + 0.5 * h * k2d);
        const double k4y = dp + h * k3d, k4d = rhs(t + h, p + h * k3y, dp + h * k3d);
        p += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
        dp += h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
        t += h;
    }
    return p;
}

// Roots of f on [a, b] by a uniform sign scan followed by plain bisection.
inline std::vector<double> scan_roots(const std::function<double(double)>& f, double a, double b, int points) {
    std::vector<double> roots;
    double x_prev = a;
    double f_prev = f(a);
    for (int k = 1; k <= points; ++k) {
        const double x = a + (b - a) * k / points;
        const double fx = f(x);
        if (f_prev == 0.0) roots.push_back(x_prev);
        else if ((f_prev < 0.0) != (fx < 0.0) && fx != 0.0) {
            double lo = x_prev, hi = x, flo = f_prev;
            for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f(mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        x_prev = x;
        f_prev = fx;
    }
    return roots;
}

}  // namespace oracle
