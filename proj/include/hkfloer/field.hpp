#pragma once

// Discretized maps f: M -> X for flat targets X = H^n or H^n/(L Z)^{4n}.
// A field stores node values and spectral coefficients (both kept in sync);
// vector fields along f use the same representation via the canonical
// trivialization of f*TX.  Torus-target arithmetic is done on lifts,
// reduction mod the lattice happens only at I/O.

#include <cstdint>
#include <optional>

#include "hkfloer/domain.hpp"

namespace hkfloer {

struct Target {
    int n = 1;                           // quaternionic dimension
    std::optional<double> lattice;       // side L of the torus quotient; absent = H^n

    int real_dim() const { return 4 * n; }
};

struct FieldMap {
    std::shared_ptr<const FrameDomain> domain;
    Target target;
    Eigen::MatrixXd values;  // 4n x P, node values of the lift
    Eigen::MatrixXd coeffs;  // 4n x B in the domain's orthonormal basis
    bool contractible = true;
    Eigen::VectorXi winding;          // torus domain x torus target only
    bool truncation_warning = false;  // values not band-limited to domain degree

    int dim() const { return target.real_dim(); }

    /// Plain L2 norm over M (no kappa weight), computed from coefficients.
    double l2_norm() const { return coeffs.norm(); }
    /// L2 norm computed from node values by quadrature.
    double l2_norm_quadrature() const;
    /// kappa-weighted L2 inner product of two fields on the same domain.
    friend double inner_kappa(const FieldMap& a, const FieldMap& b);

    FieldMap operator+(const FieldMap& o) const;
    FieldMap operator-(const FieldMap& o) const;
    FieldMap operator*(double s) const;
};

/// Field from spectral coefficients (values synthesized).
FieldMap synthesize(std::shared_ptr<const FrameDomain> domain, const Target& target,
                    const Eigen::MatrixXd& coeffs);

/// Spectral coefficients of a field by quadrature analysis.
Eigen::MatrixXd analyze(const FieldMap& f);

/// Field from node values; sets the truncation flag when the values are not
/// band-limited to the domain degree (relative defect > tol).
FieldMap field_from_values(std::shared_ptr<const FrameDomain> domain, const Target& target,
                           const Eigen::MatrixXd& values, double tol = 1e-10);

FieldMap zero_field(std::shared_ptr<const FrameDomain> domain, const Target& target);
FieldMap constant_field(std::shared_ptr<const FrameDomain> domain, const Target& target,
                        const Eigen::VectorXd& x);

/// Mean value (1/Vol) int_M f dvol of the lift.
Eigen::VectorXd mean_value(const FieldMap& f);

/// Reproducible band-limited field: coefficients uniform in [-amplitude, amplitude]
/// on basis functions of grade <= degree.
FieldMap random_bandlimited(std::shared_ptr<const FrameDomain> domain, const Target& target,
                            int degree, double amplitude, std::uint64_t seed);

/// Frame derivative d_{v_axis} f, exact on the truncated basis.
FieldMap reeb_derivative(const FieldMap& f, int axis);

/// Sphere-domain field y -> y (identity into H), Dirac eigenvalue -3.
FieldMap sphere_identity_field(std::shared_ptr<const FrameDomain> domain);
/// Sphere-domain field y -> y + 2 conj(y), Dirac eigenvalue +1.
FieldMap sphere_y_plus_2ybar_field(std::shared_ptr<const FrameDomain> domain);
/// Degree-2 Hopf eigenfield (mirror fibration composed with the inclusion
/// of S^2 into Im H), Dirac eigenvalue -4.  Needs domain degree >= 2.
FieldMap hopf_eigenfield(std::shared_ptr<const FrameDomain> domain, const ImQuat& lambda);
/// Spec'd Hopf fibration -conj(y) lambda y as a field with values in Im H.
FieldMap hopf_field(std::shared_ptr<const FrameDomain> domain, const ImQuat& lambda);

/// Deterministic uniform double in [0,1) from raw generator bits.
double uniform01(std::uint64_t bits);

}  // namespace hkfloer
