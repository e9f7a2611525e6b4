// Master-equation engine: Liouvillian construction in column-stacked
// superoperator form, steady-state solves, adaptive time evolution, and
// density-matrix functionals (expectations, partial trace, entropy).
//
// Conventions:
//   * vec() is column-stacking: vec(A rho B) = (B^T (x) A) vec(rho).  Eigen
//     matrices are column-major, so Map<VectorXcd>(rho.data()) is vec(rho).
//   * A collapse channel (C, r) contributes r (2 C rho C+ - C+C rho - rho C+C);
//     cavity loss is the channel (a, kappa), qubit decay (sigma_-, gamma/2).
#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "common.hpp"
#include "ode.hpp"
#include "operators.hpp"
#include "system.hpp"

namespace jcsim {

struct DensityMatrix {
    MatrixXcd entries;
    SpaceTag tag = SpaceTag::joint;

    Eigen::Index dim() const { return entries.rows(); }

    // Type invariants: Hermitian and unit trace within tolerance, spectrum
    // bounded below by a small negative floor.
    void validate(double herm_tol = 1e-10, double trace_tol = 1e-10,
                  double eig_floor = -1e-8) const {
        if (entries.rows() != entries.cols())
            throw ConfigError("DensityMatrix: entries must be square");
        const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
        if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > herm_tol * scale)
            throw SolverError("DensityMatrix: Hermiticity violated");
        if (std::abs(entries.trace() - cxdbl(1.0, 0.0)) > trace_tol)
            throw SolverError("DensityMatrix: trace differs from one");
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(
            MatrixXcd(0.5 * (entries + entries.adjoint())), Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < eig_floor)
            throw SolverError("DensityMatrix: negative eigenvalue beyond tolerance");
    }
};

inline DensityMatrix pure_state_density(const VectorXcd& psi, SpaceTag tag) {
    const double nrm = psi.norm();
    if (nrm <= 0.0) throw ConfigError("pure_state_density: zero state vector");
    DensityMatrix rho;
    rho.entries = (psi * psi.adjoint()) / (nrm * nrm);
    rho.tag = tag;
    return rho;
}

struct CollapseChannel {
    OperatorMatrix op;
    double rate;
};

struct Liouvillian {
    Eigen::Index dim = 0;        // superoperator dimension = space_dim^2
    Eigen::Index space_dim = 0;  // underlying Hilbert-space dimension
    SpMat entries;               // acts on column-stacked density matrices
    std::vector<CollapseChannel> collapse_channels;
    SpaceTag tag = SpaceTag::joint;

    double inf_norm() const {
        VectorXd row_sums = VectorXd::Zero(dim);
        for (int k = 0; k < entries.outerSize(); ++k)
            for (SpMat::InnerIterator it(entries, k); it; ++it)
                row_sums[it.row()] += std::abs(it.value());
        return row_sums.maxCoeff();
    }
};

// Collapse channels for the damped driven system in this code base:
// (a, kappa) and, when gamma > 0, (sigma_-, gamma/2).
inline std::vector<CollapseChannel> standard_channels(const SystemParams& p,
                                                      const TruncatedSpace& space) {
    const FockOps f = fock_ops(space);
    const QubitOps q = qubit_ops();
    std::vector<CollapseChannel> ch;
    ch.push_back({embed(f.a, space, SpaceTag::cavity), p.kappa});
    if (p.gamma > 0.0) ch.push_back({embed(q.sigma_minus, space, SpaceTag::qubit), 0.5 * p.gamma});
    return ch;
}

inline Liouvillian build_liouvillian(const OperatorMatrix& H,
                                     const std::vector<CollapseChannel>& channels) {
    const Eigen::Index d = H.dim();
    if (H.max_abs_nonhermitian() > 1e-10 * std::max(1.0, H.dense_view().cwiseAbs().maxCoeff()))
        throw ConfigError("build_liouvillian: Hamiltonian must be Hermitian");

    SpMat id(d, d);
    id.setIdentity();

    const SpMat Hs = H.sparse_view();
    SpMat L = cxdbl(0.0, -1.0) *
              (detail::kron_sparse(id, Hs) - detail::kron_sparse(SpMat(Hs.transpose()), id));

    for (const auto& ch : channels) {
        if (ch.op.dim() != d)
            throw ConfigError("build_liouvillian: channel dimension mismatch");
        if (ch.op.tag() != H.tag())
            throw ConfigError("build_liouvillian: channel space tag mismatch");
        if (ch.rate < 0.0) throw ConfigError("build_liouvillian: negative collapse rate");
        if (ch.rate == 0.0) continue;
        const SpMat C = ch.op.sparse_view();
        const SpMat Cd = SpMat(C.adjoint());
        const SpMat CdC = SpMat(Cd * C);
        L += ch.rate * (2.0 * detail::kron_sparse(SpMat(C.conjugate()), C) -
                        detail::kron_sparse(id, CdC) -
                        detail::kron_sparse(SpMat(CdC.transpose()), id));
    }

    Liouvillian out;
    out.dim = d * d;
    out.space_dim = d;
    out.entries = std::move(L);
    out.entries.makeCompressed();
    out.collapse_channels = channels;
    out.tag = H.tag();
    return out;
}

namespace detail {

// Solve A x = b by sparse LU; throws SolverError if the factorization fails.
inline VectorXcd sparse_solve(const SpMat& A, const VectorXcd& b, const char* what) {
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw SolverError(std::string(what) + ": sparse LU factorization failed");
    VectorXcd x = lu.solve(b);
    if (lu.info() != Eigen::Success)
        throw SolverError(std::string(what) + ": sparse solve failed");
    return x;
}

inline DensityMatrix vec_to_density(const VectorXcd& v, Eigen::Index d, SpaceTag tag) {
    DensityMatrix rho;
    rho.entries = Eigen::Map<const MatrixXcd>(v.data(), d, d);
    rho.entries = 0.5 * (rho.entries + rho.entries.adjoint()).eval();
    const cxdbl tr = rho.entries.trace();
    if (std::abs(tr) < 1e-300) throw SolverError("steady_state: traceless null vector");
    rho.entries /= tr;
    rho.tag = tag;
    return rho;
}

// Shifted inverse iteration on the eigenvalue of L nearest zero.
inline VectorXcd inverse_iteration_null(const SpMat& L, double norm_scale, std::uint64_t seed) {
    const Eigen::Index n = L.rows();
    SpMat shifted = L;
    SpMat id(n, n);
    id.setIdentity();
    shifted -= cxdbl(norm_scale * 1e-12, 0.0) * id;

    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(shifted);
    lu.factorize(shifted);
    if (lu.info() != Eigen::Success)
        throw SolverError("steady_state: inverse-iteration factorization failed");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    VectorXcd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = cxdbl(gauss(rng), gauss(rng));
    x /= x.norm();
    for (int it = 0; it < 50; ++it) {
        VectorXcd y = lu.solve(x);
        if (lu.info() != Eigen::Success)
            throw SolverError("steady_state: inverse-iteration solve failed");
        y /= y.norm();
        const double resid = (L * y).cwiseAbs().maxCoeff();
        x = y;
        if (resid <= 1e-12 * norm_scale) break;
    }
    return x;
}

}  // namespace detail

// Steady state of the master equation: replace one redundant population row of
// L with the trace constraint and solve the sparse linear system; fall back to
// shifted inverse iteration if the direct residual is poor.
inline DensityMatrix steady_state(const Liouvillian& L) {
    const Eigen::Index d = L.space_dim;
    const Eigen::Index n = L.dim;
    const double l_inf = L.inf_norm();
    if (!(l_inf > 0.0)) throw SolverError("steady_state: zero Liouvillian");

    // Population rows are the diagonal-of-rho positions k = i (d+1); the trace
    // constraint is linearly dependent on them.  Replace the one carrying the
    // largest diagonal magnitude (conditioning).
    VectorXcd diag = VectorXcd::Zero(n);
    for (int k = 0; k < L.entries.outerSize(); ++k)
        for (SpMat::InnerIterator it(L.entries, k); it; ++it)
            if (it.row() == it.col()) diag[it.row()] = it.value();
    Eigen::Index k_star = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        const Eigen::Index k = i * (d + 1);
        const double mag = std::abs(diag[k]);
        if (mag > best) {
            best = mag;
            k_star = k;
        }
    }
    const double row_scale = std::max(best, l_inf / static_cast<double>(n));

    std::vector<Eigen::Triplet<cxdbl>> trips;
    trips.reserve(L.entries.nonZeros() + d);
    for (int k = 0; k < L.entries.outerSize(); ++k)
        for (SpMat::InnerIterator it(L.entries, k); it; ++it)
            if (it.row() != k_star) trips.emplace_back(it.row(), it.col(), it.value());
    for (Eigen::Index i = 0; i < d; ++i)
        trips.emplace_back(k_star, i * (d + 1), cxdbl(row_scale, 0.0));
    SpMat A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();

    VectorXcd b = VectorXcd::Zero(n);
    b[k_star] = cxdbl(row_scale, 0.0);

    // Residual of the *normalized, Hermitized* candidate against the original
    // generator; this is the contract the returned state must satisfy.
    const auto candidate = [&](const VectorXcd& raw) {
        DensityMatrix r = detail::vec_to_density(raw, d, L.tag);
        const Eigen::Map<const VectorXcd> vr(r.entries.data(), n);
        const double resid = (L.entries * vr).cwiseAbs().maxCoeff();
        return std::make_pair(std::move(r), resid);
    };

    DensityMatrix rho;
    double resid = std::numeric_limits<double>::infinity();
    try {
        const VectorXcd v = detail::sparse_solve(A, b, "steady_state");
        std::tie(rho, resid) = candidate(v);
    } catch (const SolverError&) {
    }

    if (!(resid <= 1e-10 * l_inf)) {
        // Fallback: shifted inverse iteration from two independent random
        // starts; disagreement signals a degenerate steady-state manifold.
        const VectorXcd x1 = detail::inverse_iteration_null(L.entries, l_inf, 12345);
        const VectorXcd x2 = detail::inverse_iteration_null(L.entries, l_inf, 67890);
        const DensityMatrix r2 = detail::vec_to_density(x2, d, L.tag);
        std::tie(rho, resid) = candidate(x1);
        if ((rho.entries - r2.entries).cwiseAbs().maxCoeff() > 1e-6)
            throw SolverError(
                "steady_state: degenerate steady-state manifold detected (two inverse-iteration "
                "starts disagree)");
        if (!(resid <= 1e-10 * l_inf)) {
            char msg[160];
            std::snprintf(msg, sizeof(msg),
                          "steady_state: residual %.3e exceeds tolerance %.3e after fallback",
                          resid, 1e-10 * l_inf);
            throw SolverError(msg);
        }
    }

    rho.validate();
    return rho;
}

// Adaptive explicit evolution of dvec(rho)/dt = L vec(rho) through the given
// ascending time grid (t_grid[0] is the initial time for rho0).
inline std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const Liouvillian& L,
                                         const std::vector<double>& t_grid) {
    if (rho0.dim() != L.space_dim) throw ConfigError("evolve: dimension mismatch");
    if (t_grid.empty()) throw ConfigError("evolve: empty time grid");

    const Eigen::Index n = L.dim;
    VectorXcd y = Eigen::Map<const VectorXcd>(rho0.entries.data(), n);

    OdeControl ctl;
    ctl.rel_tol = 1e-8;
    ctl.abs_tol = 1e-13;

    std::vector<DensityMatrix> out(t_grid.size());
    const auto rhs = [&L](const VectorXcd& v) -> VectorXcd { return L.entries * v; };
    integrate_adaptive(
        rhs, std::move(y), t_grid, ctl, [&](std::size_t idx, const VectorXcd& v) {
            DensityMatrix r;
            r.entries = Eigen::Map<const MatrixXcd>(v.data(), L.space_dim, L.space_dim);
            r.tag = L.tag;
            const double trace_err = std::abs(r.entries.trace() - cxdbl(1.0, 0.0));
            if (trace_err > 1e-8)
                throw SolverError("evolve: trace drift exceeds tolerance");
            out[idx] = std::move(r);
        });
    return out;
}

inline cxdbl expectation(const DensityMatrix& rho, const OperatorMatrix& O) {
    if (rho.dim() != O.dim()) throw ConfigError("expectation: dimension mismatch");
    cxdbl acc(0.0, 0.0);
    const SpMat Os = O.sparse_view();
    for (int k = 0; k < Os.outerSize(); ++k)
        for (SpMat::InnerIterator it(Os, k); it; ++it)
            acc += it.value() * rho.entries(it.col(), it.row());
    return acc;
}

// Reduce a joint-space density matrix to the kept subsystem in the fixed
// qubit-major ordering (joint index = qubit * n_max + fock).
inline DensityMatrix partial_trace(const DensityMatrix& rho, const TruncatedSpace& space,
                                   SpaceTag keep) {
    if (rho.tag != SpaceTag::joint) throw ConfigError("partial_trace: input must be joint");
    if (rho.dim() != space.joint_dim()) throw ConfigError("partial_trace: dimension mismatch");
    const Eigen::Index nc = space.cavity_dim();
    DensityMatrix out;
    if (keep == SpaceTag::cavity) {
        out.entries = MatrixXcd::Zero(nc, nc);
        for (Eigen::Index q = 0; q < 2; ++q)
            out.entries += rho.entries.block(q * nc, q * nc, nc, nc);
        out.tag = SpaceTag::cavity;
    } else if (keep == SpaceTag::qubit) {
        out.entries = MatrixXcd::Zero(2, 2);
        for (Eigen::Index q = 0; q < 2; ++q)
            for (Eigen::Index qp = 0; qp < 2; ++qp)
                out.entries(q, qp) = rho.entries.block(q * nc, qp * nc, nc, nc).trace();
        out.tag = SpaceTag::qubit;
    } else {
        throw ConfigError("partial_trace: keep must be cavity or qubit");
    }
    return out;
}

// -sum lambda ln lambda over the spectrum of the Hermitized input, clamping
// eigenvalues below 1e-14 to zero (natural-log units).
inline double von_neumann_entropy(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(
        MatrixXcd(0.5 * (rho.entries + rho.entries.adjoint())), Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()[i];
        if (lam >= 1e-14) s -= lam * std::log(lam);
    }
    return s;
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw ConfigError("trace_distance: dimension mismatch");
    MatrixXcd diff = a.entries - b.entries;
    diff = 0.5 * (diff + diff.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace jcsim
