// Operator construction on the truncated cavity, qubit, and joint spaces:
// annihilation/creation/number operators, Pauli operators, tensor embedding,
// and the system Hamiltonians.
//
// Phase convention: the Hamiltonians below use real couplings,
//     H = -delta_c a^dag a - (delta_q/2) sigma_z
//         + g (a^dag sigma_- + a sigma_+) + (eps_d a^dag + eps_d^* a),
// i.e. the drive and coupling phases are absorbed into the definition of the
// mode quadratures.  This is a gauge choice (a -> e^{i phi} a) that leaves
// every gauge-invariant observable unchanged; the closed-form steady state of
// the g = 0 cavity in this convention is <a> = -i eps_d / (kappa - i delta_c),
// which is the normalization all linear-response checks in the test suite use.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "common.hpp"
#include "system.hpp"

namespace jcsim {

enum class SpaceTag { cavity, qubit, joint };

inline const char* to_string(SpaceTag t) {
    switch (t) {
        case SpaceTag::cavity: return "cavity";
        case SpaceTag::qubit: return "qubit";
        case SpaceTag::joint: return "joint";
    }
    return "?";
}

// Square complex operator with a space tag.  Storage is sparse for dimension
// > 64 and dense otherwise; both views are available on demand regardless of
// the backing store.
class OperatorMatrix {
  public:
    static constexpr int sparse_threshold = 64;

    OperatorMatrix() = default;

    OperatorMatrix(const MatrixXcd& m, SpaceTag tag) : tag_(tag), dim_(m.rows()) {
        if (m.rows() != m.cols())
            throw ConfigError("OperatorMatrix: matrix must be square");
        if (dim_ > sparse_threshold) {
            sparse_ = m.sparseView();
            sparse_.makeCompressed();
            store_sparse_ = true;
        } else {
            dense_ = m;
            store_sparse_ = false;
        }
    }

    OperatorMatrix(const SpMat& m, SpaceTag tag) : tag_(tag), dim_(m.rows()) {
        if (m.rows() != m.cols())
            throw ConfigError("OperatorMatrix: matrix must be square");
        if (dim_ > sparse_threshold) {
            sparse_ = m;
            sparse_.makeCompressed();
            store_sparse_ = true;
        } else {
            dense_ = MatrixXcd(m);
            store_sparse_ = false;
        }
    }

    Eigen::Index dim() const { return dim_; }
    SpaceTag tag() const { return tag_; }
    bool stored_sparse() const { return store_sparse_; }

    SpMat sparse_view() const {
        if (store_sparse_) return sparse_;
        SpMat s = dense_.sparseView();
        s.makeCompressed();
        return s;
    }

    MatrixXcd dense_view() const {
        if (store_sparse_) return MatrixXcd(sparse_);
        return dense_;
    }

    cxdbl coeff(Eigen::Index i, Eigen::Index j) const {
        return store_sparse_ ? sparse_.coeff(i, j) : dense_(i, j);
    }

    OperatorMatrix adjoint() const {
        if (store_sparse_) return OperatorMatrix(SpMat(sparse_.adjoint()), tag_);
        return OperatorMatrix(MatrixXcd(dense_.adjoint()), tag_);
    }

    friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
        require_same_space(a, b, "product");
        return OperatorMatrix(SpMat(a.sparse_view() * b.sparse_view()), a.tag_);
    }

    friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
        require_same_space(a, b, "sum");
        return OperatorMatrix(SpMat(a.sparse_view() + b.sparse_view()), a.tag_);
    }

    friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
        require_same_space(a, b, "difference");
        return OperatorMatrix(SpMat(a.sparse_view() - b.sparse_view()), a.tag_);
    }

    friend OperatorMatrix operator*(cxdbl c, const OperatorMatrix& a) {
        return OperatorMatrix(SpMat(c * a.sparse_view()), a.tag_);
    }

    double max_abs_nonhermitian() const {
        const MatrixXcd d = dense_view();
        return (d - d.adjoint()).cwiseAbs().maxCoeff();
    }

  private:
    static void require_same_space(const OperatorMatrix& a, const OperatorMatrix& b,
                                   const char* what) {
        if (a.dim_ != b.dim_ || a.tag_ != b.tag_)
            throw ConfigError(std::string("OperatorMatrix: ") + what +
                              " requires matching space and dimension");
    }

    SpaceTag tag_ = SpaceTag::cavity;
    Eigen::Index dim_ = 0;
    bool store_sparse_ = false;
    SpMat sparse_;
    MatrixXcd dense_;
};

struct FockOps {
    OperatorMatrix a;
    OperatorMatrix a_dag;
    OperatorMatrix n_op;
};

// Annihilation, creation, and number operators on the truncated Fock space.
inline FockOps fock_ops(const TruncatedSpace& space) {
    const int n = space.n_max;
    SpMat a(n, n);
    {
        std::vector<Eigen::Triplet<cxdbl>> trip;
        trip.reserve(static_cast<std::size_t>(n));
        for (int k = 1; k < n; ++k)
            trip.emplace_back(k - 1, k, cxdbl(std::sqrt(static_cast<double>(k)), 0.0));
        a.setFromTriplets(trip.begin(), trip.end());
    }
    OperatorMatrix A(a, SpaceTag::cavity);
    OperatorMatrix Adag = A.adjoint();
    return FockOps{A, Adag, Adag * A};
}

struct QubitOps {
    OperatorMatrix sigma_minus;
    OperatorMatrix sigma_plus;
    OperatorMatrix sigma_z;
};

// Pauli lowering/raising/inversion operators with the excited state first in
// the basis ordering; sigma_z |ground> = -|ground>.
inline QubitOps qubit_ops() {
    MatrixXcd sm = MatrixXcd::Zero(2, 2);
    sm(1, 0) = 1.0;  // sigma_- |e> = |g>
    MatrixXcd sz = MatrixXcd::Zero(2, 2);
    sz(0, 0) = 1.0;
    sz(1, 1) = -1.0;
    OperatorMatrix SM(sm, SpaceTag::qubit);
    return QubitOps{SM, SM.adjoint(), OperatorMatrix(sz, SpaceTag::qubit)};
}

// Identity on a chosen factor or the joint space.
inline OperatorMatrix identity_op(const TruncatedSpace& space, SpaceTag tag) {
    int d = 0;
    switch (tag) {
        case SpaceTag::cavity: d = space.cavity_dim(); break;
        case SpaceTag::qubit: d = space.qubit_dim(); break;
        case SpaceTag::joint: d = space.joint_dim(); break;
    }
    SpMat I(d, d);
    I.setIdentity();
    return OperatorMatrix(I, tag);
}

namespace detail {

inline SpMat kron_sparse(const SpMat& A, const SpMat& B) {
    SpMat out(A.rows() * B.rows(), A.cols() * B.cols());
    std::vector<Eigen::Triplet<cxdbl>> trip;
    trip.reserve(static_cast<std::size_t>(A.nonZeros()) * static_cast<std::size_t>(B.nonZeros()));
    for (int ka = 0; ka < A.outerSize(); ++ka)
        for (SpMat::InnerIterator ita(A, ka); ita; ++ita)
            for (int kb = 0; kb < B.outerSize(); ++kb)
                for (SpMat::InnerIterator itb(B, kb); itb; ++itb)
                    trip.emplace_back(ita.row() * B.rows() + itb.row(),
                                      ita.col() * B.cols() + itb.col(),
                                      ita.value() * itb.value());
    out.setFromTriplets(trip.begin(), trip.end());
    out.makeCompressed();
    return out;
}

}  // namespace detail

// Tensor embedding of a single-factor operator into the joint space, in the
// fixed qubit-major ordering (qubit factor on the left of the product).
inline OperatorMatrix embed(const OperatorMatrix& op, const TruncatedSpace& space,
                            SpaceTag which) {
    if (which != SpaceTag::cavity && which != SpaceTag::qubit)
        throw ConfigError("embed: `which` must name a single factor");
    if (op.tag() != which)
        throw ConfigError(std::string("embed: operator tagged ") + to_string(op.tag()) +
                          " does not match requested factor " + to_string(which));
    const int expected = which == SpaceTag::cavity ? space.cavity_dim() : space.qubit_dim();
    if (op.dim() != expected)
        throw ConfigError("embed: operator dimension inconsistent with the space");

    SpMat iq(space.qubit_dim(), space.qubit_dim());
    iq.setIdentity();
    SpMat ic(space.cavity_dim(), space.cavity_dim());
    ic.setIdentity();
    SpMat joint = which == SpaceTag::cavity ? detail::kron_sparse(iq, op.sparse_view())
                                            : detail::kron_sparse(op.sparse_view(), ic);
    return OperatorMatrix(joint, SpaceTag::joint);
}

// Full system Hamiltonian on the joint space (see the phase convention in the
// header comment).  Hermitian by construction.
inline OperatorMatrix build_jc_hamiltonian(const SystemParams& p, const TruncatedSpace& space) {
    p.validate();
    const FockOps f = fock_ops(space);
    const QubitOps q = qubit_ops();
    const OperatorMatrix N = embed(f.n_op, space, SpaceTag::cavity);
    const OperatorMatrix A = embed(f.a, space, SpaceTag::cavity);
    const OperatorMatrix Adag = embed(f.a_dag, space, SpaceTag::cavity);
    const OperatorMatrix SZ = embed(q.sigma_z, space, SpaceTag::qubit);
    const OperatorMatrix SM = embed(q.sigma_minus, space, SpaceTag::qubit);
    const OperatorMatrix SP = embed(q.sigma_plus, space, SpaceTag::qubit);

    SpMat H = cxdbl(-p.delta_c, 0.0) * N.sparse_view() +
              cxdbl(-0.5 * p.delta_q, 0.0) * SZ.sparse_view() +
              cxdbl(p.g, 0.0) * (SpMat(Adag.sparse_view() * SM.sparse_view()) +
                                 SpMat(A.sparse_view() * SP.sparse_view())) +
              p.eps_d * Adag.sparse_view() + std::conj(p.eps_d) * A.sparse_view();
    return OperatorMatrix(H, SpaceTag::joint);
}

// Effective cavity-only Hamiltonian obtained by replacing the qubit inversion
// with the scalar s (= +1 or -1) in the dispersive expansion through fourth
// order in g:
//   H = (-delta_c + g^4/delta^3 - (g^2/delta) s + 2 (g^4/delta^3) s) a^dag a
//       + (g^4/delta^3) s a^dag a^dag a a + (eps_d a^dag + eps_d^* a).
// The quartic (Kerr) coefficient is chi = (g^4/delta^3) s.
inline OperatorMatrix build_duffing_hamiltonian(const SystemParams& p, const TruncatedSpace& space,
                                                double sigma_z_value) {
    p.validate();
    if (!(p.delta() > 0.0) && p.g > 0.0)
        throw ConfigError("build_duffing_hamiltonian: dispersive limit requires delta > 0");
    if (sigma_z_value != 1.0 && sigma_z_value != -1.0)
        throw ConfigError("build_duffing_hamiltonian: sigma_z replacement must be +1 or -1");

    const double s = sigma_z_value;
    double lin = -p.delta_c;
    double chi = 0.0;
    if (p.g > 0.0) {
        const double d = p.delta();
        const double g2d = p.g * p.g / d;
        const double g4d3 = sqr(p.g * p.g) / (d * d * d);
        lin = -p.delta_c + g4d3 - g2d * s + 2.0 * g4d3 * s;
        chi = g4d3 * s;
    }

    const FockOps f = fock_ops(space);
    const SpMat n = f.n_op.sparse_view();
    // a^dag a^dag a a = n (n - 1), diagonal on the Fock basis.
    SpMat n2(space.n_max, space.n_max);
    {
        std::vector<Eigen::Triplet<cxdbl>> trip;
        for (int k = 0; k < space.n_max; ++k)
            trip.emplace_back(k, k, cxdbl(static_cast<double>(k) * (k - 1.0), 0.0));
        n2.setFromTriplets(trip.begin(), trip.end());
    }
    SpMat H = cxdbl(lin, 0.0) * n + cxdbl(chi, 0.0) * n2 +
              p.eps_d * f.a_dag.sparse_view() + std::conj(p.eps_d) * f.a.sparse_view();
    return OperatorMatrix(H, SpaceTag::cavity);
}

// Total excitation number N = a^dag a + sigma_+ sigma_- on the joint space.
inline OperatorMatrix excitation_number(const TruncatedSpace& space) {
    const FockOps f = fock_ops(space);
    const QubitOps q = qubit_ops();
    return embed(f.n_op, space, SpaceTag::cavity) +
           embed(q.sigma_plus * q.sigma_minus, space, SpaceTag::qubit);
}

}  // namespace jcsim
