// Physical parameter set of the driven dissipative qubit-cavity system in the
// frame rotating with the drive, plus the truncated Hilbert-space descriptor.
//
// Conventions fixed here and never varied:
//   * All rates and detunings share one inverse-time unit (hbar = 1).
//   * delta_c = omega_drive - omega_cavity, delta_q = omega_drive - omega_qubit.
//   * The cavity field decays at kappa (photon loss rate 2*kappa); the qubit
//     relaxes at gamma.
//   * Joint basis ordering is qubit-index-major: |qubit> (x) |fock>, excited
//     qubit block first, so joint index = qubit_index * n_max + fock_index.
#pragma once

#include <cmath>
#include <string>

#include "common.hpp"

namespace jcsim {

struct SystemParams {
    double delta_c = 0.0;   // drive-cavity detuning (rad/time)
    double delta_q = 0.0;   // drive-qubit detuning (rad/time)
    double g = 0.0;         // qubit-cavity coupling (rad/time)
    cxdbl eps_d{0.0, 0.0};  // coherent drive amplitude (rad/time)
    double kappa = 0.0;     // field decay rate (1/time); photon loss is 2*kappa
    double gamma = 0.0;     // qubit relaxation rate (1/time)

    void validate() const {
        if (!(kappa > 0.0)) throw ConfigError("SystemParams: kappa must be > 0");
        if (g < 0.0) throw ConfigError("SystemParams: g must be >= 0");
        if (gamma < 0.0) throw ConfigError("SystemParams: gamma must be >= 0");
    }

    // Qubit-cavity detuning magnitude |omega_c - omega_q|.
    double delta() const { return std::abs(delta_q - delta_c); }

    // Signed version (omega_c - omega_q); positive when the cavity lies above
    // the qubit, which is the regime all the reference parameter sets use.
    double delta_signed() const { return delta_q - delta_c; }

    void require_dispersive(const char* what) const {
        if (!(delta() > 0.0))
            throw ConfigError(std::string("SystemParams: ") + what +
                              " requires qubit-cavity detuning delta > 0");
    }

    // Dispersive frequency shift lambda = g^2 / delta.
    double lambda_shift() const {
        require_dispersive("lambda_shift");
        return g * g / delta();
    }

    // Photon scale (delta / 2g)^2 at which the nonlinearity saturates.
    double n_scale() const {
        require_dispersive("n_scale");
        if (!(g > 0.0)) throw ConfigError("SystemParams: n_scale requires g > 0");
        return sqr(delta() / (2.0 * g));
    }

    // Cooperativity C = g^2 / (kappa * gamma); only defined for gamma > 0.
    double cooperativity() const {
        if (!(gamma > 0.0))
            throw ConfigError("SystemParams: cooperativity requires gamma > 0");
        return g * g / (kappa * gamma);
    }

    // Cavity-mediated qubit decay rate kappa * g^2 / delta^2.
    double purcell_rate() const {
        require_dispersive("purcell_rate");
        return kappa * g * g / sqr(delta());
    }
};

struct TruncatedSpace {
    int n_max = 0;  // Fock states 0 .. n_max-1

    explicit TruncatedSpace(int n) : n_max(n) {
        if (n_max < 2)
            throw ConfigError("TruncatedSpace: n_max must be >= 2");
    }

    int cavity_dim() const { return n_max; }
    int qubit_dim() const { return 2; }
    int joint_dim() const { return 2 * n_max; }

    // Joint index of |qubit q, fock n> in the fixed qubit-major ordering
    // (q = 0 excited, q = 1 ground).
    int joint_index(int qubit, int fock) const { return qubit * n_max + fock; }
};

}  // namespace jcsim
