// Phase-space representations: Husimi Q and Wigner functions of cavity
// density matrices, closed-form results for the driven Duffing oscillator
// (photon statistics, symmetric moments, analytic Wigner function), and
// critical-point classification of phase-space grids.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "common.hpp"
#include "lindblad.hpp"
#include "specfun.hpp"
#include "system.hpp"

namespace jcsim {

// ---------------------------------------------------------------------------
// Grids

struct GridSpec {
    double x_min = -5.0, x_max = 5.0;
    int nx = 101;
    double y_min = -5.0, y_max = 5.0;
    int ny = 101;

    void validate() const {
        if (nx < 2 || ny < 2) throw ConfigError("GridSpec: nx and ny must be >= 2");
        if (!(x_max > x_min) || !(y_max > y_min))
            throw ConfigError("GridSpec: empty axis range");
    }
    double dx() const { return (x_max - x_min) / (nx - 1); }
    double dy() const { return (y_max - y_min) / (ny - 1); }
    double x(int j) const { return x_min + j * dx(); }
    double y(int i) const { return y_min + i * dy(); }
};

struct PhaseGrid {
    double x_min = 0.0, x_max = 0.0;
    int nx = 0;
    double y_min = 0.0, y_max = 0.0;
    int ny = 0;
    MatrixXd values;  // row i <-> y(i), column j <-> x(j)
    double mass = 0.0;
    bool coverage_warning = false;

    double dx() const { return (x_max - x_min) / (nx - 1); }
    double dy() const { return (y_max - y_min) / (ny - 1); }
    double x(int j) const { return x_min + j * dx(); }
    double y(int i) const { return y_min + i * dy(); }
    double cell_area() const { return dx() * dy(); }

    double riemann_sum() const { return values.sum() * cell_area(); }

    cxdbl first_moment() const {
        cxdbl acc(0.0, 0.0);
        for (int i = 0; i < ny; ++i)
            for (int j = 0; j < nx; ++j) acc += values(i, j) * cxdbl(x(j), y(i));
        return acc * cell_area();
    }

    static PhaseGrid from_spec(const GridSpec& g) {
        g.validate();
        PhaseGrid out;
        out.x_min = g.x_min;
        out.x_max = g.x_max;
        out.nx = g.nx;
        out.y_min = g.y_min;
        out.y_max = g.y_max;
        out.ny = g.ny;
        out.values = MatrixXd::Zero(g.ny, g.nx);
        return out;
    }
};

// Default square window sized from the photon statistics of the state:
// half-width 2.5 + sqrt(<n> + 3 sigma_n) covers the coherent radius plus a
// few vacuum widths.
inline GridSpec default_grid_spec(const DensityMatrix& rho_c, int points_per_axis = 101) {
    if (rho_c.tag != SpaceTag::cavity)
        throw ConfigError("default_grid_spec: cavity-reduced state required");
    const Eigen::Index d = rho_c.dim();
    double n1 = 0.0, n2 = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
        const double pk = rho_c.entries(k, k).real();
        n1 += k * pk;
        n2 += static_cast<double>(k) * k * pk;
    }
    const double var = std::max(0.0, n2 - n1 * n1);
    const double half = 2.5 + std::sqrt(std::max(0.0, n1 + 3.0 * std::sqrt(var)));
    GridSpec g;
    g.x_min = -half;
    g.x_max = half;
    g.y_min = -half;
    g.y_max = half;
    g.nx = points_per_axis;
    g.ny = points_per_axis;
    return g;
}

namespace detail {

// Fock-basis coefficients of the coherent state |alpha> in a truncated space:
// c_k = exp(-|alpha|^2/2) alpha^k / sqrt(k!), by stable upward recurrence.
inline VectorXcd coherent_vector(cxdbl alpha, Eigen::Index dim) {
    VectorXcd v(dim);
    v[0] = std::exp(-0.5 * std::norm(alpha));
    for (Eigen::Index k = 1; k < dim; ++k) v[k] = v[k - 1] * alpha / std::sqrt(double(k));
    return v;
}

}  // namespace detail

// Husimi Q(alpha) = <alpha| rho |alpha> / pi, evaluated over the grid.
inline PhaseGrid husimi_q(const DensityMatrix& rho_c, const GridSpec& spec) {
    if (rho_c.tag != SpaceTag::cavity) throw ConfigError("husimi_q: cavity tag required");
    PhaseGrid out = PhaseGrid::from_spec(spec);
    const Eigen::Index d = rho_c.dim();
    for (int i = 0; i < spec.ny; ++i) {
        for (int j = 0; j < spec.nx; ++j) {
            const cxdbl alpha(spec.x(j), spec.y(i));
            const VectorXcd phi = detail::coherent_vector(alpha, d);
            out.values(i, j) = (phi.adjoint() * rho_c.entries * phi)(0, 0).real() / pi;
        }
    }
    out.mass = out.riemann_sum();
    out.coverage_warning = out.mass < 0.999;
    return out;
}

// Wigner W(alpha) = (2/pi) sum_n (-1)^n <n| D(-alpha) rho D(alpha) |n> in
// displaced-parity form.  The displaced Fock columns D(alpha)|n> are built by
// upward recurrence in a space padded by +20 Fock states so displacement
// leakage stays below grid tolerance.
inline PhaseGrid wigner(const DensityMatrix& rho_c, const GridSpec& spec) {
    if (rho_c.tag != SpaceTag::cavity) throw ConfigError("wigner: cavity tag required");
    PhaseGrid out = PhaseGrid::from_spec(spec);
    const Eigen::Index d = rho_c.dim();
    const Eigen::Index pad = d + 20;

    VectorXcd phi(pad), next(pad), head(d), rho_phi(d);
    for (int i = 0; i < spec.ny; ++i) {
        for (int j = 0; j < spec.nx; ++j) {
            const cxdbl alpha(spec.x(j), spec.y(i));
            phi = detail::coherent_vector(alpha, pad);
            double acc = 0.0;
            double sign = 1.0;
            for (Eigen::Index n = 0;; ++n) {
                // quadratic form uses only the first d components
                head = phi.head(d);
                rho_phi.noalias() = rho_c.entries * head;
                acc += sign * (head.adjoint() * rho_phi)(0, 0).real();
                if (n + 1 >= pad) break;
                // D(alpha)|n+1> = (adag - conj(alpha)) D(alpha)|n> / sqrt(n+1)
                next[0] = -std::conj(alpha) * phi[0];
                for (Eigen::Index k = 1; k < pad; ++k)
                    next[k] = (std::sqrt(double(k)) * phi[k - 1] -
                               std::conj(alpha) * phi[k]);
                next /= std::sqrt(double(n + 1));
                phi.swap(next);
                sign = -sign;
            }
            out.values(i, j) = (2.0 / pi) * acc;
        }
    }
    out.mass = out.riemann_sum();
    out.coverage_warning = std::abs(out.mass - 1.0) > 1e-3;
    return out;
}

// ---------------------------------------------------------------------------
// Closed-form driven Duffing oscillator results

struct DuffingParams {
    cxdbl c;               // (kappa - i dwc') / (i chi)
    double chi = 0.0;      // s g^4 / delta^3
    cxdbl eps_tilde;       // drive scaled by the nonlinearity (frame-consistent)
    double delta_c_prime = 0.0;
    double s = -1.0;       // sigma_z replacement value
};

// Derive the Duffing-approximation parameter block from system parameters,
// replacing sigma_z by the scalar s (ground-state branch s = -1).
inline DuffingParams duffing_params(const SystemParams& p, double s = -1.0) {
    if (s != -1.0 && s != 1.0) throw ConfigError("duffing_params: s must be -1 or +1");
    p.validate();
    p.require_dispersive("duffing_params");
    if (p.g <= 0.0) throw ConfigError("duffing_params: coupling must be positive (chi != 0)");
    const double delta = p.delta();
    const double lam = p.g * p.g / delta;
    const double g4d3 = lam * lam / delta;
    DuffingParams dp;
    dp.s = s;
    dp.chi = g4d3 * s;
    dp.delta_c_prime = p.delta_c + lam * s - g4d3 * (2.0 * s + 1.0);
    dp.c = (p.kappa - cxdbl(0.0, 1.0) * dp.delta_c_prime) / (cxdbl(0.0, 1.0) * dp.chi);
    dp.eps_tilde = -p.eps_d / dp.chi;
    return dp;
}

// Steady-state photon number distribution p(n), n = 0..n_max-1, computed in
// log space from Gamma-ratio and 0F2 building blocks.
inline std::vector<double> duffing_photon_pdf(const DuffingParams& dp, Eigen::Index n_max,
                                              const SeriesControl& ctl = {}) {
    if (n_max < 1) throw ConfigError("duffing_photon_pdf: n_max must be >= 1");
    const cxdbl d = std::conj(dp.c);
    const double et2 = std::norm(dp.eps_tilde);
    std::vector<double> p(static_cast<std::size_t>(n_max));
    if (et2 == 0.0) {
        p[0] = 1.0;
        return p;
    }
    const double log_den = hyp0f2_log(dp.c, d, cxdbl(2.0 * et2, 0.0), ctl).real();
    const double lg_c2 = 2.0 * log_gamma(dp.c).real();
    for (Eigen::Index n = 0; n < n_max; ++n) {
        const cxdbl cn = dp.c + static_cast<double>(n);
        const double log_num = hyp0f2_log(cn, std::conj(cn), cxdbl(et2, 0.0), ctl).real();
        const double log_pn = n * std::log(et2) - std::lgamma(double(n) + 1.0) +
                              (lg_c2 - 2.0 * log_gamma(cn).real()) + log_num - log_den;
        p[static_cast<std::size_t>(n)] = std::exp(log_pn);
    }
    return p;
}

// First moment <a+ a> from the closed form
// m1 = |et|^2 0F2(c+1, d+1; 2|et|^2) / (c d 0F2(c, d; 2|et|^2)).
inline double duffing_mean_photon(const DuffingParams& dp, const SeriesControl& ctl = {}) {
    const double et2 = std::norm(dp.eps_tilde);
    if (et2 == 0.0) return 0.0;
    const cxdbl d = std::conj(dp.c);
    const cxdbl log_ratio = hyp0f2_log(dp.c + 1.0, d + 1.0, cxdbl(2.0 * et2, 0.0), ctl) -
                            hyp0f2_log(dp.c, d, cxdbl(2.0 * et2, 0.0), ctl);
    const cxdbl m1 = et2 * std::exp(log_ratio) / (dp.c * d);
    if (std::abs(m1.imag()) > 1e-10 * std::max(1.0, std::abs(m1)))
        throw SolverError("duffing_mean_photon: imaginary residue beyond tolerance");
    return m1.real();
}

// Symmetrically ordered moments <(a+)^n a^m>_S from the generalized-P double
// sum collapsed by the angular delta (k + n = l + m), in log space:
//   pref = 4 |Gamma(c)|^2 / 0F2(c, d; 2|et|^2),
//   term_k = (2 et)^k (2 et*)^{k+n-m} (k+n)! /
//            (2^{k+n+2} k! (k+n-m)! Gamma(k+c) Gamma(k+n-m+d)).
inline cxdbl duffing_symmetric_moment(const DuffingParams& dp, int n, int m,
                                      const SeriesControl& ctl = {}) {
    if (n < 0 || m < 0 || n > 4 || m > 4)
        throw ConfigError("duffing_symmetric_moment: orders must be in [0, 4]");
    SeriesControl c2 = ctl;
    c2.validate();
    const cxdbl d = std::conj(dp.c);
    const double et2 = std::norm(dp.eps_tilde);
    const double log_pref =
        std::log(4.0) + 2.0 * log_gamma(dp.c).real() -
        hyp0f2_log(dp.c, d, cxdbl(2.0 * et2, 0.0), c2).real();

    const cxdbl l2et = std::log(2.0 * dp.eps_tilde);        // principal
    const cxdbl l2etc = std::log(2.0 * std::conj(dp.eps_tilde));
    const double ln2 = std::log(2.0);

    cxdbl sum(0.0, 0.0);
    double prev_small = std::numeric_limits<double>::infinity();
    const int k0 = std::max(0, m - n);
    for (int k = k0; k < k0 + c2.max_terms; ++k) {
        const int knm = k + n - m;  // >= 0
        const cxdbl log_term = double(k) * l2et + double(knm) * l2etc +
                               std::lgamma(double(k + n) + 1.0) -
                               double(k + n + 2) * ln2 - std::lgamma(double(k) + 1.0) -
                               std::lgamma(double(knm) + 1.0) -
                               log_gamma(double(k) + dp.c) -
                               log_gamma(double(knm) + d);
        const cxdbl term = std::exp(log_term);
        sum += term;
        const double tmag = std::abs(term);
        const double smag = std::abs(sum);
        if (k > k0 + 2 && tmag <= c2.rel_tol * smag && prev_small <= c2.rel_tol * smag)
            return std::exp(log_pref) * sum;
        prev_small = tmag;
    }
    throw SolverError("duffing_symmetric_moment: series did not converge");
}

// Analytic steady-state Wigner function of the Duffing model:
// W(alpha) = (2/pi) e^{-2|alpha|^2} |0F1(c; 2 et alpha*)|^2 / 0F2(c, d; 2|et|^2).
inline double duffing_wigner_analytic(const DuffingParams& dp, const SystemParams& /*p*/,
                                      cxdbl alpha, const SeriesControl& ctl = {}) {
    const cxdbl d = std::conj(dp.c);
    const double et2 = std::norm(dp.eps_tilde);
    const double log_den = et2 > 0.0
                               ? hyp0f2_log(dp.c, d, cxdbl(2.0 * et2, 0.0), ctl).real()
                               : 0.0;
    const double log_f1_re =
        hyp0f1_log(dp.c, 2.0 * dp.eps_tilde * std::conj(alpha), ctl).real();
    const double logw = std::log(2.0 / pi) - 2.0 * std::norm(alpha) + 2.0 * log_f1_re - log_den;
    return std::exp(logw);
}

// Grid evaluation of the analytic Duffing Wigner function.
inline PhaseGrid duffing_wigner_grid(const DuffingParams& dp, const SystemParams& p,
                                     const GridSpec& spec, const SeriesControl& ctl = {}) {
    PhaseGrid out = PhaseGrid::from_spec(spec);
    for (int i = 0; i < spec.ny; ++i)
        for (int j = 0; j < spec.nx; ++j)
            out.values(i, j) =
                duffing_wigner_analytic(dp, p, cxdbl(spec.x(j), spec.y(i)), ctl);
    out.mass = out.riemann_sum();
    out.coverage_warning = std::abs(out.mass - 1.0) > 1e-3;
    return out;
}

// ---------------------------------------------------------------------------
// Critical points

enum class CriticalKind { maximum, minimum, saddle };

inline const char* to_string(CriticalKind k) {
    switch (k) {
        case CriticalKind::maximum: return "maximum";
        case CriticalKind::minimum: return "minimum";
        case CriticalKind::saddle: return "saddle";
    }
    return "?";
}

struct CriticalPoint {
    cxdbl position;
    CriticalKind kind = CriticalKind::maximum;
    double value = 0.0;
};

// Interior cells where the centered discrete gradient changes sign along both
// axes; classified by the discrete-Hessian sign pattern; candidates below the
// prominence floor (default 1e-4 of the grid maximum) are discarded.
inline std::vector<CriticalPoint> find_critical_points(const PhaseGrid& grid,
                                                       double prominence_rel = 1e-4) {
    const MatrixXd& v = grid.values;
    const int ny = grid.ny, nx = grid.nx;
    if (ny < 3 || nx < 3) return {};

    // centered differences inside, one-sided at the edges
    MatrixXd gx(ny, nx), gy(ny, nx);
    for (int i = 0; i < ny; ++i) {
        gx(i, 0) = v(i, 1) - v(i, 0);
        gx(i, nx - 1) = v(i, nx - 1) - v(i, nx - 2);
        for (int j = 1; j < nx - 1; ++j) gx(i, j) = 0.5 * (v(i, j + 1) - v(i, j - 1));
    }
    for (int j = 0; j < nx; ++j) {
        gy(0, j) = v(1, j) - v(0, j);
        gy(ny - 1, j) = v(ny - 1, j) - v(ny - 2, j);
        for (int i = 1; i < ny - 1; ++i) gy(i, j) = 0.5 * (v(i + 1, j) - v(i - 1, j));
    }

    const double floor = prominence_rel * v.maxCoeff();
    std::vector<CriticalPoint> out;
    for (int i = 1; i < ny - 1; ++i) {
        for (int j = 1; j < nx - 1; ++j) {
            if (!(gx(i, j - 1) * gx(i, j + 1) < 0.0 && gy(i - 1, j) * gy(i + 1, j) < 0.0))
                continue;
            if (v(i, j) < floor) continue;
            const double hxx = v(i, j + 1) - 2.0 * v(i, j) + v(i, j - 1);
            const double hyy = v(i + 1, j) - 2.0 * v(i, j) + v(i - 1, j);
            const double hxy = 0.25 * (v(i + 1, j + 1) - v(i + 1, j - 1) - v(i - 1, j + 1) +
                                       v(i - 1, j - 1));
            const double det = hxx * hyy - hxy * hxy;
            CriticalPoint cp;
            cp.position = cxdbl(grid.x(j), grid.y(i));
            cp.value = v(i, j);
            if (det < 0.0)
                cp.kind = CriticalKind::saddle;
            else if (hxx + hyy < 0.0)
                cp.kind = CriticalKind::maximum;
            else
                cp.kind = CriticalKind::minimum;
            out.push_back(cp);
        }
    }
    return out;
}

// Merge same-kind detections within a Chebyshev cell radius into one physical
// critical point (plateaus make the cell-level detector fire on neighbors).
// Representative: largest value for maxima, smallest for minima, first for
// saddles.  Linkage is transitive (union-find over nearby pairs).
inline std::vector<CriticalPoint> cluster_critical_points(
    const std::vector<CriticalPoint>& points, const PhaseGrid& grid, int radius_cells = 2) {
    const std::size_t n = points.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    const auto find = [&parent](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    const double rx = radius_cells * grid.dx() * 1.0001;
    const double ry = radius_cells * grid.dy() * 1.0001;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (points[i].kind != points[j].kind) continue;
            const cxdbl dp = points[i].position - points[j].position;
            if (std::abs(dp.real()) <= rx && std::abs(dp.imag()) <= ry)
                parent[find(i)] = find(j);
        }
    std::vector<CriticalPoint> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (find(i) != i) continue;
        CriticalPoint rep = points[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (find(j) != i || j == i) continue;
            if ((rep.kind == CriticalKind::maximum && points[j].value > rep.value) ||
                (rep.kind == CriticalKind::minimum && points[j].value < rep.value))
                rep = points[j];
        }
        out.push_back(rep);
    }
    return out;
}

}  // namespace jcsim
