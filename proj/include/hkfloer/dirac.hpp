#pragma once

// The quaternionic Dirac operator Df = I d_{v1}f + J d_{v2}f + K d_{v3}f,
// linear for flat targets, with perturbed Hessians D_{f,H} = D - grad grad H(f),
// Galerkin spectra on the truncated bases, torus mode blocks, and the
// Laplace identity D D f = d*df - kappa D f.

#include "hkfloer/field.hpp"
#include "hkfloer/hamiltonian.hpp"

namespace hkfloer {

/// D applied exactly on the truncated basis.
FieldMap dirac_apply(const FieldMap& f);

/// Perturbed Hessian D xi - grad grad H(f) xi; the second term is evaluated
/// node-wise, so the result carries a truncation flag when it leaves the basis.
FieldMap hessian_apply(const FieldMap& f, const HamiltonianSpec& H, const FieldMap& xi);

/// Dense symmetric matrix of D on the first B_deg basis functions,
/// coefficients flattened column-major as vec(C) with C of shape 4n x B.
Eigen::MatrixXd dirac_matrix(const FrameDomain& d, int n, int degree);

/// Galerkin projection of the multiplication operator grad grad H(f) on the
/// truncated basis (same flattening as dirac_matrix).
Eigen::MatrixXd hessian_projection(const FrameDomain& d, const HamiltonianSpec& H,
                                   const FieldMap& f, int degree);

struct SpectralDecomposition {
    std::shared_ptr<const FrameDomain> domain;
    Target target;
    int degree = 0;
    Eigen::VectorXd eigenvalues;  // ascending
    Eigen::MatrixXd vectors;      // orthonormal coefficient columns
    Eigen::VectorXd residuals;    // |M v - mu v| per pair

    /// Eigenfield i as a FieldMap, normalized in the kappa-weighted L2 product.
    FieldMap eigenfield(int i) const;
};

/// Full symmetric eigendecomposition of the truncated Galerkin matrix of D
/// (or D_{f,H} when a Hamiltonian and base point are supplied).
SpectralDecomposition spectrum(std::shared_ptr<const FrameDomain> d, int degree, int n,
                               const HamiltonianSpec* H = nullptr,
                               const FieldMap* f = nullptr);

struct ModeBlock {
    Eigen::Vector3i k;
    Eigen::MatrixXd block;      // 8n x 8n on span{cos, sin} x H^n; 4n x 4n zero for k = 0
    double closed_form_ev = 0;  // 2 pi |A k|
};

ModeBlock mode_block(const FrameDomain& d, const Eigen::Vector3i& k, int n);

/// ||D D f + kappa D f + sum_i d_{v_i} d_{v_i} f||_{L2}; zero for the Cartan
/// sphere by the Laplace identity.
double laplace_identity_residual(const FieldMap& f);

/// Smallest c0 with ||xi||^2 <= c0 ||D xi||^2 over mean-zero truncated xi,
/// i.e. 1 / (smallest nonzero |eigenvalue|)^2.
double poincare_constant(const FrameDomain& d, int degree, int n);

/// Minimal |eigenvalue| and minimal positive eigenvalue of D on the truncation.
struct DiracGap {
    double min_abs_nonzero = 0.0;
    double min_positive = 0.0;
};
DiracGap dirac_gap(const FrameDomain& d, int degree, int n);

}  // namespace hkfloer
