#pragma once

// Spectral flow along one-parameter families of symmetric truncated
// operators t -> D_{f_t, tH} + eps (1 - t) Id, the Floer index
// mu_H(f) = -specflow, and closed-loop flow checks for flat targets.
//
// A family is given by a block assembler (the assembled operator is block
// diagonal; a single block means dense).  The flow is counted by continuous
// tracking of sorted eigenvalues with adaptive bisection of the t-grid until
// no crossing is ambiguous; each step contributes the difference of negative
// counts, which for a symmetric finite family equals the net number of
// eigenvalues crossing zero upward.

#include <functional>
#include <map>

#include "hkfloer/dirac.hpp"

namespace hkfloer {

struct OperatorFamily {
    std::function<std::vector<Eigen::MatrixXd>(double)> blocks_at;
    double eps = 0.0;
    int size = 0;  // total dimension
};

struct SpectralFlowResult {
    int flow = 0;
    std::vector<double> t_samples;                // refined grid
    std::vector<Eigen::VectorXd> eigenvalues;     // merged, ascending, per sample
    double endpoint_min_abs = 0.0;                // invertibility margin at t = 0, 1
};

/// Net count of eigenvalues crossing zero upward minus downward.
/// Throws NumericalError on a degenerate endpoint or an ambiguous crossing
/// that survives max_depth bisections.
SpectralFlowResult spectral_flow(const OperatorFamily& fam, int initial_steps = 12,
                                 int max_depth = 24);

/// Family along the constant path f_t == x from the constant map, with
/// Hamiltonian tH and shift eps (1-t).  Block-diagonal over torus modes when
/// H is y-independent; dense otherwise.
OperatorFamily hessian_family_constant(std::shared_ptr<const FrameDomain> d,
                                       const Target& target, const Eigen::VectorXd& x,
                                       const HamiltonianSpec& H, double eps, int degree);

/// Family along the linear path f_t = mean(f) + t (f - mean(f)) with
/// Hamiltonian tH (dense assembly per t).
OperatorFamily hessian_family_linear(const FieldMap& f, const HamiltonianSpec& H, double eps,
                                     int degree);

/// Default shift: half the smallest positive eigenvalue of D on the truncation.
double default_epsilon(const FrameDomain& d, int degree, int n);

struct FloerIndexResult {
    int mu = 0;
    int mu_coarser = 0;     // index at degree-1, must agree
    double eps = 0.0;
    SpectralFlowResult flow;
};

/// mu_H of a constant critical point x: minus the spectral flow of the
/// shifted Hessian family, computed at `degree` and `degree-1` (the run
/// fails unless the two agree).
FloerIndexResult floer_index(std::shared_ptr<const FrameDomain> d, const Target& target,
                             const Eigen::VectorXd& x, const HamiltonianSpec& H, int degree,
                             double eps = 0.0);

/// mu_H of a general critical point via the linear path from its mean value.
FloerIndexResult floer_index_field(const FieldMap& f, const HamiltonianSpec& H, int degree,
                                   double eps = 0.0);

/// Spectral flow of a closed family (f_0 = f_1, H_0 = H_1); zero for flat targets.
int loop_flow_check(const OperatorFamily& loop);

}  // namespace hkfloer
