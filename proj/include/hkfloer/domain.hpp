#pragma once

// Frame-equipped 3-manifolds: the Cartan 3-sphere (unit quaternions with
// Reeb frame v_i(y) = q_i y) and the flat 3-torus with a constant frame
// v_i = sum_j a_ij d/dt_j.  A domain carries a quadrature rule that is
// exact on products of two band-limited functions, and the matrices of
// the frame derivatives on an orthonormal scalar basis:
//   - sphere: restrictions of real polynomials of degree <= `degree`,
//     graded so that grade-m functions are the degree-m spherical
//     harmonics (the frame flows are linear, so differentiation is exact
//     on the basis);
//   - torus: real Fourier modes with |k|_inf <= `degree`.

#include <array>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hkfloer/quat.hpp"

namespace hkfloer {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class DomainKind { Sphere3, Torus3 };

struct TorusMode {
    Eigen::Vector3i k;
    int cos_idx = -1;  // basis row of sqrt(2) cos(2 pi k.t); row 0 is the constant
    int sin_idx = -1;
};

struct FrameDomain {
    DomainKind kind = DomainKind::Sphere3;
    int degree = 0;        // sphere: max polynomial degree; torus: max |k|_inf
    double kappa = 2.0;    // d alpha_1(v_2, v_3); 2 on the Cartan sphere, 1 on the torus
    Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();  // torus frame rows a_i
    double frame_cond = 1.0;

    Eigen::MatrixXd nodes;    // P x 4 (unit quaternions) or P x 3 (points of [0,1)^3)
    Eigen::VectorXd weights;  // volume units, sum = Vol(M)
    double volume = 0.0;

    int res_angle = 0;   // sphere: trapezoid points per Hopf angle
    int res_radial = 0;  // sphere: Gauss-Legendre points; torus: grid size N

    int basis_size = 0;
    Eigen::MatrixXd basis_values;         // B x P
    std::vector<int> basis_degree;        // grade per basis row
    std::array<Eigen::MatrixXd, 3> deriv; // d_{v_i} on the basis, B x B, skew
    std::array<Eigen::MatrixXd, 3> deriv_right;  // sphere only: right-invariant frame
    int discarded_directions = 0;         // sphere: Gram directions below threshold

    std::vector<TorusMode> modes;  // torus only

    int num_nodes() const { return static_cast<int>(nodes.rows()); }

    /// Number of basis functions of grade <= deg (prefix of the graded basis).
    int basis_size_for_degree(int deg) const;

    /// Reeb / frame vector at a node, as a 3- or 4-vector in ambient coords.
    Eigen::VectorXd frame_vector(int axis, int node) const;
};

/// max |k|_inf usable on an N-point-per-axis torus grid with exact analysis.
int torus_max_degree(int N);

std::shared_ptr<const FrameDomain> build_sphere_domain(int degree, int res_angle = 0,
                                                       int res_radial = 0);

std::shared_ptr<const FrameDomain> build_torus_domain(const Eigen::Matrix3d& A, int N,
                                                      int degree = -1);

struct HypercontactReport {
    double max_alpha_pairing = 0.0;  // |alpha_i(v_j) - delta_ij|
    double max_dalpha = 0.0;         // |d alpha_i(v_j, v_k) - kappa|, cyclic
    double max_bracket = 0.0;        // |[v_i, v_j] - kappa v_k|, closed form
    double max_mu = 0.0;             // |mu| components
    double max_star = 0.0;           // |d alpha_i - kappa * alpha_i| on frame pairs
    double kappa = 0.0;              // measured d alpha_1(v_2, v_3)
    double quadrature_defect = 0.0;  // |sum weights - Vol|
    double max_violation() const;
};

/// Evaluates the Cartan identities at every node (sphere); for the torus
/// reports the closedness of the dual frame forms and epsilon_i(v_j).
HypercontactReport verify_hypercontact(const FrameDomain& d);

/// Hopf fibration h_lambda(y) = -conj(y) lambda y onto the unit imaginary
/// quaternions.  Satisfies d_{v_j} h_i = -d_{v_i} h_j = 2 h_k for cyclic ijk.
ImQuat hopf_map(const ImQuat& lambda, const Quat& y);

/// Opposite-chirality fibration h(y) = -y lambda conj(y).  Composed with the
/// inclusion of S^2 into the imaginary quaternions it is the degree-2
/// eigenfield of the left Dirac operator with eigenvalue -4.
ImQuat hopf_map_mirror(const ImQuat& lambda, const Quat& y);

}  // namespace hkfloer
