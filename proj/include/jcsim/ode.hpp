// Shared adaptive explicit integrator: Dormand-Prince 5(4) with embedded
// error control, used for density-matrix evolution and mean-field dynamics.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "common.hpp"

namespace jcsim {

struct OdeControl {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    double initial_step = 0.0;  // 0 -> auto
    double min_step_factor = 1e-14;
};

namespace detail {

// One Dormand-Prince 5(4) step: fills y5 (5th-order result) and err (embedded
// difference).  rhs(y) must return the derivative.
template <typename Vec, typename Rhs>
void dopri5_step(const Rhs& rhs, const Vec& y, const Vec& k1, double h, Vec& y5, Vec& err,
                 Vec& k_last) {
    const Vec k2 = rhs(Vec(y + h * (1.0 / 5.0) * k1));
    const Vec k3 = rhs(Vec(y + h * ((3.0 / 40.0) * k1 + (9.0 / 40.0) * k2)));
    const Vec k4 =
        rhs(Vec(y + h * ((44.0 / 45.0) * k1 + (-56.0 / 15.0) * k2 + (32.0 / 9.0) * k3)));
    const Vec k5 = rhs(Vec(y + h * ((19372.0 / 6561.0) * k1 + (-25360.0 / 2187.0) * k2 +
                                    (64448.0 / 6561.0) * k3 + (-212.0 / 729.0) * k4)));
    const Vec k6 = rhs(Vec(y + h * ((9017.0 / 3168.0) * k1 + (-355.0 / 33.0) * k2 +
                                    (46732.0 / 5247.0) * k3 + (49.0 / 176.0) * k4 +
                                    (-5103.0 / 18656.0) * k5)));
    y5 = y + h * ((35.0 / 384.0) * k1 + (500.0 / 1113.0) * k3 + (125.0 / 192.0) * k4 +
                  (-2187.0 / 6784.0) * k5 + (11.0 / 84.0) * k6);
    k_last = rhs(y5);
    const Vec y4 = y + h * ((5179.0 / 57600.0) * k1 + (7571.0 / 16695.0) * k3 +
                            (393.0 / 640.0) * k4 + (-92097.0 / 339200.0) * k5 +
                            (187.0 / 2100.0) * k6 + (1.0 / 40.0) * k_last);
    err = y5 - y4;
}

template <typename Vec>
double dopri5_error_norm(const Vec& err, const Vec& y0, const Vec& y1, double rtol,
                         double atol) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc =
            atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        m = std::max(m, std::abs(err[i]) / sc);
    }
    return m;
}

}  // namespace detail

// Integrate y' = rhs(y) from t_grid.front() through every grid point,
// invoking on_sample(index, y) at each one.  t_grid must be ascending.
template <typename Vec, typename Rhs, typename Sampler>
void integrate_adaptive(const Rhs& rhs, Vec y, const std::vector<double>& t_grid,
                        const OdeControl& ctl, Sampler on_sample) {
    if (t_grid.empty()) return;
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw ConfigError("integrate_adaptive: time grid must be strictly ascending");

    double t = t_grid.front();
    on_sample(std::size_t{0}, y);

    const double t_final = t_grid.back();
    const double span = std::max(t_final - t, 1e-300);
    double h = ctl.initial_step > 0.0 ? ctl.initial_step : span * 1e-4;
    const double h_min = ctl.min_step_factor * std::max(1.0, std::abs(t_final));

    Vec k1 = rhs(y), y5 = y, err = y, k_last = y;
    for (std::size_t target = 1; target < t_grid.size(); ++target) {
        const double t_stop = t_grid[target];
        while (t < t_stop) {
            bool hit = false;
            double h_try = h;
            if (t + h_try >= t_stop) {
                h_try = t_stop - t;
                hit = true;
            }
            detail::dopri5_step(rhs, y, k1, h_try, y5, err, k_last);
            const double en =
                detail::dopri5_error_norm(err, y, y5, ctl.rel_tol, ctl.abs_tol);
            if (en <= 1.0) {
                t = hit ? t_stop : t + h_try;
                y.swap(y5);
                k1.swap(k_last);  // FSAL
                const double grow = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
                h = h_try * std::min(5.0, std::max(1.0, grow));
            } else {
                h = h_try * std::max(0.2, 0.9 * std::pow(en, -0.2));
            }
            if (h < h_min)
                throw SolverError(
                    "adaptive integrator: step size underflow (stiff system); reduce the "
                    "truncation dimension or use an implicit method");
        }
        on_sample(target, y);
    }
}

}  // namespace jcsim
