#pragma once

// Critical-point solving for D f = grad H(f), Morse trajectory counting on
// the flat target, and connecting-orbit boundary value problems for
//   du/ds + eps^{-1} D u = grad H(u),   u(-S) = f-,  u(+S) = f+.
// Forward time stepping is unusable here (D has unbounded negative
// spectrum), so orbits are posed as collocation BVPs: 4-stage Lobatto IIIA
// in s (order 6) with projected linearized boundary conditions and a phase
// condition fixing the time shift.

#include "hkfloer/action.hpp"
#include "hkfloer/specflow.hpp"

namespace hkfloer {

struct CriticalPoint {
    FieldMap f;
    double residual = 0.0;         // kappa-weighted L2 norm of D f - grad H(f)
    double hessian_min_abs = 0.0;  // smallest |eigenvalue| of D_{f,H}
    int mu = 0;                    // Floer index
    double action_value = 0.0;     // A_H(f)
    bool nondegenerate = false;

    Eigen::VectorXd point() const { return mean_value(f); }
};

struct NewtonOptions {
    int max_iter = 60;
    double tol = 1e-11;
    double dedup_tol = 1e-6;
    int solve_degree = 1;   // truncation for the Newton system
    int report_degree = 3;  // truncation for mu and the Hessian gap
    bool compute_mu = true;
};

/// Newton iteration on the truncated system from each seed; converged
/// solutions are deduplicated by L2 distance (mod the target lattice for
/// torus targets) and annotated with mu, the Hessian gap, and A_H.
std::vector<CriticalPoint> find_critical_points(const HamiltonianSpec& H,
                                                std::shared_ptr<const FrameDomain> d,
                                                const Target& target,
                                                const std::vector<FieldMap>& seeds,
                                                const NewtonOptions& opt = {});

/// Constant seeds: closed-form critical constants for separable H, otherwise
/// a coordinate lattice of side `per_axis`.
std::vector<FieldMap> critical_seeds(const HamiltonianSpec& H,
                                     std::shared_ptr<const FrameDomain> d,
                                     const Target& target, int per_axis = 4);

// ---------------------------------------------------------------------------
// Morse trajectories of the positive gradient flow du0/ds = grad H(u0).

struct CircleCritical {
    double x = 0.0;
    bool is_max = false;
    double value = 0.0;
    double hess = 0.0;
};

/// Critical points of a circle factor, sorted by position in [0, L).
/// Throws NumericalError on a degenerate critical point (Morse violation).
std::vector<CircleCritical> circle_critical_points(const CircleFactor& h);

struct TrajectoryCountResult {
    int count = 0;
    int mod2 = 0;
};

/// Count of positive-gradient trajectories x- -> x+ with index difference 1,
/// exact per factor for separable H.
TrajectoryCountResult morse_trajectories(const Eigen::VectorXd& xm, const Eigen::VectorXd& xp,
                                         const HamiltonianSpec& H);

/// Morse index of H at a critical constant (number of negative Hessian
/// eigenvalues).
int morse_index(const HamiltonianSpec& H, const Eigen::VectorXd& x);

// ---------------------------------------------------------------------------
// Connecting-orbit BVP.

struct TrajectorySolution {
    double epsilon = 0.0;
    Eigen::VectorXd s_grid;
    std::vector<FieldMap> slices;
    CriticalPoint left, right;
    double residual = 0.0;          // space-time L2 defect of the collocation system
    double energy = 0.0;            // int int |du/ds|^2 kappa dvol ds
    double action_drop = 0.0;       // A_{H,eps}(f-) - A_{H,eps}(f+)
    std::vector<double> action_values;  // A_{H,eps}(u(s)) per grid point
    double max_oscillation = 0.0;   // sup_s sup_y |u - mean_y u|
    double sup_frame_deriv = 0.0;   // sup |d_{v_i} u|
    double boundary_defect = 0.0;   // |u(+-S) - f^+-|
    int newton_iterations = 0;
    std::vector<double> newton_residuals;

    /// du/ds at a grid point, from the equation.
    FieldMap s_derivative(int slice_index, const HamiltonianSpec& H) const;
};

struct BvpOptions {
    double half_length = 0.0;   // S; 0 = auto from the endpoint Hessian gaps
    int slices_per_unit = 16;
    int max_iter = 30;
    double tol = 1e-10;
    double boundary_tol = 1e-6;
};

/// eps-scaled perturbed action eps^{-1} A(f) - int H(f) kappa dvol, the
/// functional whose negative L2 gradient flow is the eps Floer equation.
double perturbed_action_eps(const FieldMap& f, const HamiltonianSpec& H, double eps);

TrajectorySolution connect_orbit_bvp(const CriticalPoint& left, const CriticalPoint& right,
                                     const HamiltonianSpec& H, double eps,
                                     const BvpOptions& opt = {},
                                     const std::vector<FieldMap>* initial_guess = nullptr);

/// Morse-trajectory initial guess, y-independent, centered at s = 0.
std::vector<FieldMap> morse_initial_guess(const CriticalPoint& left,
                                          const CriticalPoint& right,
                                          const HamiltonianSpec& H,
                                          const Eigen::VectorXd& s_grid);

struct DecayFit {
    double rho_left = 0.0;
    double rho_right = 0.0;
    double r2_left = 0.0;
    double r2_right = 0.0;
};

/// Least-squares fit of log ||du/ds||_{L2} over each tail; throws on a
/// too-short or non-monotone tail.
DecayFit decay_rate(const TrajectorySolution& u, const HamiltonianSpec& H,
                    double tail_fraction = 0.25);

struct AdiabaticRecord {
    double eps = 0.0;
    double oscillation = 0.0;
    double sup_frame_deriv = 0.0;
    double c_fit = 0.0;  // sup |d_{v_i} u| / eps
    double energy = 0.0;
    double action_drop = 0.0;
};

struct AdiabaticReport {
    std::vector<AdiabaticRecord> records;
    double max_ratio_drift = 0.0;  // |c(eps/2)/c(eps) - 1| over consecutive halvings
    bool c_ratio_ok = false;
};

AdiabaticReport adiabatic_experiment(const HamiltonianSpec& H, const std::vector<double>& eps_list,
                                     const CriticalPoint& left, const CriticalPoint& right,
                                     const BvpOptions& opt = {});

}  // namespace hkfloer
