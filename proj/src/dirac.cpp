#include "hkfloer/dirac.hpp"

#include <cmath>
#include <numbers>

namespace hkfloer {

namespace {
const std::array<Quat, 3> kFrameQuats = {kQuatI, kQuatJ, kQuatK};
}

FieldMap dirac_apply(const FieldMap& f) {
    FieldMap g = f;
    g.coeffs.setZero();
    for (int i = 0; i < 3; ++i) {
        const Eigen::MatrixXd dc = f.coeffs * f.domain->deriv[i].transpose();
        const Eigen::MatrixXd Q = left_mult_matrix_n(kFrameQuats[i], f.target.n);
        g.coeffs += Q * dc;
    }
    g.values = g.coeffs * f.domain->basis_values;
    return g;
}

FieldMap hessian_apply(const FieldMap& f, const HamiltonianSpec& H, const FieldMap& xi) {
    if (f.domain.get() != xi.domain.get())
        throw ConfigError("hessian_apply: mismatched domains");
    FieldMap dxi = dirac_apply(xi);
    Eigen::MatrixXd v = dxi.values;
    for (int p = 0; p < f.domain->num_nodes(); ++p)
        v.col(p) -= H.hess(f.values.col(p), f.domain.get(), p) * xi.values.col(p);
    return field_from_values(f.domain, f.target, v);
}

Eigen::MatrixXd dirac_matrix(const FrameDomain& d, int n, int degree) {
    const int B = d.basis_size_for_degree(degree);
    const int N = 4 * n * B;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < 3; ++i) {
        const Eigen::MatrixXd Q = left_mult_matrix_n(kFrameQuats[i], n);
        const Eigen::MatrixXd D = d.deriv[i].topLeftCorner(B, B);
        for (int b = 0; b < B; ++b)
            for (int a = 0; a < B; ++a)
                if (D(a, b) != 0.0) M.block(4 * n * a, 4 * n * b, 4 * n, 4 * n) += D(a, b) * Q;
    }
    return M;
}

Eigen::MatrixXd hessian_projection(const FrameDomain& d, const HamiltonianSpec& H,
                                   const FieldMap& f, int degree) {
    const int B = d.basis_size_for_degree(degree);
    const int m = 4 * H.n;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m * B, m * B);
    for (int p = 0; p < d.num_nodes(); ++p) {
        const Eigen::MatrixXd W = d.weights[p] * H.hess(f.values.col(p), &d, p);
        const Eigen::VectorXd phi = d.basis_values.col(p).head(B);
        for (int b = 0; b < B; ++b) {
            if (phi[b] == 0.0) continue;
            for (int a = 0; a < B; ++a) {
                const double c = phi[a] * phi[b];
                if (c != 0.0) M.block(m * a, m * b, m, m) += c * W;
            }
        }
    }
    return M;
}

FieldMap SpectralDecomposition::eigenfield(int i) const {
    const int B = static_cast<int>(vectors.rows()) / target.real_dim();
    Eigen::MatrixXd c =
        Eigen::Map<const Eigen::MatrixXd>(vectors.col(i).data(), target.real_dim(), B);
    c /= std::sqrt(domain->kappa);  // kappa-weighted normalization
    return synthesize(domain, target, c);
}

SpectralDecomposition spectrum(std::shared_ptr<const FrameDomain> d, int degree, int n,
                               const HamiltonianSpec* H, const FieldMap* f) {
    if (degree > d->degree) throw ConfigError("spectrum: degree exceeds domain band limit");
    SpectralDecomposition out;
    out.domain = d;
    out.target = Target{n, std::nullopt};
    out.degree = degree;
    Eigen::MatrixXd M = dirac_matrix(*d, n, degree);
    if (H) {
        FieldMap base = f ? *f : zero_field(d, out.target);
        M -= hessian_projection(*d, *H, base, degree);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    if (es.info() != Eigen::Success)
        throw NumericalError("spectrum: eigensolver failed to converge");
    out.eigenvalues = es.eigenvalues();
    out.vectors = es.eigenvectors();
    out.residuals.resize(out.eigenvalues.size());
    for (int i = 0; i < out.eigenvalues.size(); ++i)
        out.residuals[i] =
            (M * out.vectors.col(i) - out.eigenvalues[i] * out.vectors.col(i)).norm();
    return out;
}

ModeBlock mode_block(const FrameDomain& d, const Eigen::Vector3i& k, int n) {
    if (d.kind != DomainKind::Torus3) throw ConfigError("mode_block: torus domain required");
    ModeBlock mb;
    mb.k = k;
    if (k.isZero()) {
        mb.block = Eigen::MatrixXd::Zero(4 * n, 4 * n);
        mb.closed_form_ev = 0.0;
        return mb;
    }
    const Eigen::Vector3d ak = d.frame * k.cast<double>();
    Quat lambda{0, ak[0], ak[1], ak[2]};
    Eigen::MatrixXd L = 2.0 * std::numbers::pi * left_mult_matrix_n(lambda, n);
    const int m = 4 * n;
    mb.block = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    mb.block.topRightCorner(m, m) = L;      // D(sin) = +Lambda cos
    mb.block.bottomLeftCorner(m, m) = -L;   // D(cos) = -Lambda sin
    mb.closed_form_ev = 2.0 * std::numbers::pi * ak.norm();
    return mb;
}

double laplace_identity_residual(const FieldMap& f) {
    if (f.domain->kind != DomainKind::Sphere3)
        throw ConfigError("laplace_identity_residual: sphere domain required");
    const FieldMap df = dirac_apply(f);
    FieldMap r = dirac_apply(df) + df * f.domain->kappa;
    for (int i = 0; i < 3; ++i) r = r + reeb_derivative(reeb_derivative(f, i), i);
    return r.l2_norm();
}

double poincare_constant(const FrameDomain& d, int degree, int n) {
    // Shared-domain spectra want a shared_ptr; wrap without ownership.
    std::shared_ptr<const FrameDomain> alias(&d, [](const FrameDomain*) {});
    const SpectralDecomposition s = spectrum(alias, degree, n);
    double mn = std::numeric_limits<double>::infinity();
    for (int i = 0; i < s.eigenvalues.size(); ++i) {
        const double a = std::abs(s.eigenvalues[i]);
        if (a > 1e-8) mn = std::min(mn, a);
    }
    return 1.0 / (mn * mn);
}

DiracGap dirac_gap(const FrameDomain& d, int degree, int n) {
    std::shared_ptr<const FrameDomain> alias(&d, [](const FrameDomain*) {});
    const SpectralDecomposition s = spectrum(alias, degree, n);
    DiracGap g;
    g.min_abs_nonzero = std::numeric_limits<double>::infinity();
    g.min_positive = std::numeric_limits<double>::infinity();
    for (int i = 0; i < s.eigenvalues.size(); ++i) {
        const double v = s.eigenvalues[i];
        if (std::abs(v) > 1e-8) g.min_abs_nonzero = std::min(g.min_abs_nonzero, std::abs(v));
        if (v > 1e-8) g.min_positive = std::min(g.min_positive, v);
    }
    return g;
}

}  // namespace hkfloer
