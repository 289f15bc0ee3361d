#pragma once

// Report-style verification of the a-priori inequalities along computed
// trajectories (energy-density and |du/ds|^2 differential inequalities, the
// second-derivative bound, the slice-wise derivative bound), the mean-value
// monitor of the Heinz type, and the sphere slice/radial-extension checks.

#include "hkfloer/dynamics.hpp"

namespace hkfloer {

struct AprioriMonitorReport {
    // sL e_u + r_u >= -A - B e^{3/2} (flat target: r_u = 0)
    double ler_min_lhs = 0.0;   // min of sL e_u over the interior grid
    double ler_fit_A = 0.0;     // minimal A with B = 0
    double ler_fit_B = 0.0;     // minimal B with A = 0
    double ler_fit_C = 0.0;     // minimal C in sL e >= -C e (H = 0 form)
    // sL |du/ds|^2 >= -C (1 + |du|^2) |du/ds|^2
    double les_fit_C = 0.0;
    // second-derivative bound over the inner window with the stated constant
    double ddu_lhs = 0.0;
    double ddu_rhs = 0.0;
    double ddu_constant = 0.0;  // 2 ||H||_C3 ||du/ds||_inf + 2 ||H||_C2^2
    bool ddu_holds = false;
    // slice-wise bound (1/2) int |du|^2 <= A + Vol sup|grad H|^2 + (3/2) int |du/ds|^2
    double dudsu_min_margin = 0.0;
    bool dudsu_holds = false;
};

AprioriMonitorReport monitor_apriori(const TrajectorySolution& u, const HamiltonianSpec& H);

struct SliceCheckReport {
    double radius = 0.0;
    double a_r = 0.0;       // slice action
    double e_r = 0.0;       // slice energy
    double iso_margin = 0.0;  // r E_r - A_r >= 0
    bool iso_holds = false;
    double are_lhs = 0.0;   // E_r + (2/r) A_r
    double are_rhs = 0.0;   // (1/r^2) int_{S_r} |I du(v1) + J du(v2) + K du(v3)|^2
    double are_residual = 0.0;
    double ball_energy = 0.0;       // int_{B_r} |du|^2 of the radial extension
    double ball_identity_rhs = 0.0; // (r^2/2) int_{S^3} |df|^2
    double ball_residual = 0.0;     // relative
};

/// Slice quantities of the radial extension u(t) = f(t/|t|), computed in the
/// ball frame (right-invariant fields on R^4).
SliceCheckReport sphere_slice_check(const FieldMap& f, double r);

struct HeinzReport {
    double alpha = 0.0;
    double sup_e = 0.0;      // over the interior grid
    double integral_e = 0.0;
    double min_slack = 0.0;  // min of sL e + A + B e^mu
    bool hypothesis_holds = false;
    double c_empirical = 0.0;  // sup e / (A + int e + (B^{n/2} int e)^alpha)
};

/// Checks sL e >= -A - B e^mu on the interior grid of a nonnegative field on
/// R x M (n = 4) or on M alone (single slice, n = 3).
HeinzReport heinz_monitor(const FrameDomain& d, const Eigen::VectorXd& s_grid,
                          const Eigen::MatrixXd& e_slices, double A, double B, double mu_exp,
                          int n_dim);

}  // namespace hkfloer
