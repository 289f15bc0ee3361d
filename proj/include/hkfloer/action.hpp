#pragma once

// The hypersymplectic action A(f) = (1/2) <f, Df>_kappa on lifts of
// contractible maps, the perturbed action A_H = A - int H(f) kappa dvol,
// the energy E(f) = (1/2) int |df|^2, the L2 gradient Df - grad H(f), and
// the Cartan energy identity E = A + (1/2) int |Df|^2.

#include "hkfloer/dirac.hpp"

namespace hkfloer {

/// Rejects non-contractible torus-target maps (class-dependent action).
void require_lift(const FieldMap& f);

double action(const FieldMap& f);

double perturbed_action(const FieldMap& f, const HamiltonianSpec& H);

/// int_M H(f) kappa dvol by quadrature.
double hamiltonian_integral(const FieldMap& f, const HamiltonianSpec& H);

double energy(const FieldMap& f);

/// grad A_H(f) = Df - grad H(f) in the kappa-weighted L2 product.
FieldMap action_gradient(const FieldMap& f, const HamiltonianSpec* H = nullptr);

/// |E(f) - A(f) - (1/2) int |Df|^2 dvol| on the Cartan sphere (no kappa
/// weight on the quadratic term).
double energy_identity_residual(const FieldMap& f);

struct AprioriReport {
    double action_value = 0.0;
    double dirac_sq = 0.0;  // int |Df|^2 dvol
    double c = 0.0;         // 1 + kappa^2 c0
    double margin = 0.0;    // c * dirac_sq - action
    bool holds = false;
};

/// A(f) <= c int |Df|^2 with c = 1 + kappa^2 c0 from the truncated Poincare
/// constant c0 of the domain.
AprioriReport apriori_bound_check(const FieldMap& f, double c0);

}  // namespace hkfloer
