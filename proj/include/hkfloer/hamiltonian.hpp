#pragma once

// Perturbations H: X x M -> R as finite trigonometric series on a torus
// target, with evaluators for H, grad H, and the Hessian grad grad H (all
// derivatives in the target variable).  An optional per-term domain factor
// couples the perturbation to M through a scalar basis function.

#include <vector>

#include "hkfloer/field.hpp"

namespace hkfloer {

struct HamTerm {
    double amplitude = 0.0;
    Eigen::VectorXi target_freq;  // m, size 4n; term is a cos(2 pi m.x / L + phase)
    double phase = 0.0;
    int domain_basis = -1;  // index into the domain scalar basis, -1 = y-independent
};

struct HamiltonianSpec {
    int n = 1;          // target quaternionic dimension
    double lattice = 1.0;  // target lattice side L
    std::vector<HamTerm> terms;

    int dim() const { return 4 * n; }
    bool y_independent() const;
    /// Every term depends on a single coordinate and carries no domain factor.
    bool separable() const;

    /// Domain factor of a term at a node (1 when y-independent).
    double domain_factor(const HamTerm& t, const FrameDomain* d, int node) const;

    double eval(const Eigen::VectorXd& x, const FrameDomain* d = nullptr, int node = -1) const;
    Eigen::VectorXd grad(const Eigen::VectorXd& x, const FrameDomain* d = nullptr,
                         int node = -1) const;
    Eigen::MatrixXd hess(const Eigen::VectorXd& x, const FrameDomain* d = nullptr,
                         int node = -1) const;

    /// Upper bound on the C^l norm in the target variable, l = 0..3.
    double c_norm(int l, const FrameDomain* d = nullptr) const;
    /// max H - min H over the target torus (separable closed form, else sampled).
    double range(const FrameDomain* d = nullptr) const;
    /// sup |grad H| bound.
    double sup_grad(const FrameDomain* d = nullptr) const;
};

/// Separable Morse function sum_mu a_mu cos(2 pi (x_mu - s_mu) / L).
HamiltonianSpec separable_cos(int n, const Eigen::VectorXd& amplitudes,
                              const Eigen::VectorXd& shifts, double lattice = 1.0);

/// Separable H whose mu-th factor is a_mu cos(4 pi (x_mu - s_mu) / L) for the
/// axes listed in `double_freq` (two minima per circle) and the single-frequency
/// cosine otherwise.
HamiltonianSpec separable_mixed(int n, const Eigen::VectorXd& amplitudes,
                                const Eigen::VectorXd& shifts,
                                const std::vector<int>& double_freq, double lattice = 1.0);

/// One-dimensional restriction h_mu of a separable Hamiltonian.
struct CircleFactor {
    std::vector<HamTerm> terms;  // frequencies as scalars in target_freq[0]
    double lattice = 1.0;
    double eval(double x) const;
    double deriv(double x) const;
    double deriv2(double x) const;
};

CircleFactor circle_factor(const HamiltonianSpec& h, int mu);

}  // namespace hkfloer
