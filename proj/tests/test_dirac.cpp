#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "hkfloer/dirac.hpp"

using namespace hkfloer;

namespace {
constexpr double kPi = std::numbers::pi;
const Target kH1{1, std::nullopt};

double eigen_residual(const FieldMap& f, double mu) {
    const FieldMap df = dirac_apply(f);
    return (df - f * mu).l2_norm() / f.l2_norm();
}
}  // namespace

TEST_CASE("sphere eigenfields: y -> -3, y + 2 conj(y) -> +1, hopf -> -4, const -> 0") {
    auto d = build_sphere_domain(2);
    CHECK(eigen_residual(sphere_identity_field(d), -3.0) < 1e-11);
    CHECK(eigen_residual(sphere_y_plus_2ybar_field(d), 1.0) < 1e-11);
    CHECK(eigen_residual(hopf_eigenfield(d, ImQuat{1, 0, 0}), -4.0) < 1e-11);
    CHECK(eigen_residual(hopf_eigenfield(d, ImQuat{0, 1, 0}), -4.0) < 1e-11);
    CHECK(dirac_apply(constant_field(d, kH1, Eigen::Vector4d{1, 2, 3, 4})).l2_norm() < 1e-12);
}

TEST_CASE("dirac_apply is linear and kappa-self-adjoint") {
    auto d = build_sphere_domain(3);
    for (std::uint64_t s = 0; s < 5; ++s) {
        const FieldMap f = random_bandlimited(d, kH1, 3, 1.0, 10 + s);
        const FieldMap g = random_bandlimited(d, kH1, 3, 1.0, 20 + s);
        const FieldMap lhs = dirac_apply(f + g * 2.0);
        const FieldMap rhs = dirac_apply(f) + dirac_apply(g) * 2.0;
        CHECK((lhs - rhs).l2_norm() < 1e-11);
        CHECK(std::abs(inner_kappa(dirac_apply(f), g) - inner_kappa(f, dirac_apply(g))) <
              1e-10);
    }
}

TEST_CASE("sphere spectrum at degree 1 and 2") {
    auto d1 = build_sphere_domain(1);
    const SpectralDecomposition s1 = spectrum(d1, 1, 1);
    // degree <= 1 basis: eigenvalues 0 (constants, x4), -3, +1
    int zero = 0, m3 = 0, p1 = 0;
    for (int i = 0; i < s1.eigenvalues.size(); ++i) {
        const double mu = s1.eigenvalues[i];
        if (std::abs(mu) < 1e-9) ++zero;
        if (std::abs(mu + 3) < 1e-9) ++m3;
        if (std::abs(mu - 1) < 1e-9) ++p1;
    }
    CHECK(zero == 4);
    CHECK(m3 > 0);
    CHECK(p1 > 0);
    CHECK(zero + m3 + p1 == s1.eigenvalues.size());

    auto d2 = build_sphere_domain(2);
    const SpectralDecomposition s2 = spectrum(d2, 2, 1);
    bool has_m4 = false;
    for (int i = 0; i < s2.eigenvalues.size(); ++i)
        if (std::abs(s2.eigenvalues[i] + 4) < 1e-9) has_m4 = true;
    CHECK(has_m4);
    CHECK(s2.residuals.maxCoeff() < 1e-8);
    // every eigenvalue satisfies mu^2 + 2 mu = d(d+2) for an integer d <= 2
    for (int i = 0; i < s2.eigenvalues.size(); ++i) {
        const double q = s2.eigenvalues[i] * (s2.eigenvalues[i] + 2.0);
        double best = 1e300;
        for (int dd = 0; dd <= 2; ++dd) best = std::min(best, std::abs(q - dd * (dd + 2.0)));
        CHECK(best < 1e-8);
    }
    // kernel of D = constants exactly (dimension 4n)
    int kernel = 0;
    for (int i = 0; i < s2.eigenvalues.size(); ++i)
        if (std::abs(s2.eigenvalues[i]) < 1e-9) ++kernel;
    CHECK(kernel == 4);

    // eigenfields are kappa-orthonormal
    const FieldMap e0 = s2.eigenfield(0), e1 = s2.eigenfield(1);
    CHECK(inner_kappa(e0, e0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(inner_kappa(e0, e1)) < 1e-8);
}

TEST_CASE("torus mode blocks against a dense eigendecomposition oracle") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    auto check_block = [&](const FrameDomain& dom, const Eigen::Vector3i& k, double expect) {
        const ModeBlock mb = mode_block(dom, k, 1);
        CHECK(mb.closed_form_ev == doctest::Approx(expect).epsilon(1e-12));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mb.block);
        int plus = 0, minus = 0;
        for (int i = 0; i < es.eigenvalues().size(); ++i) {
            CHECK(std::abs(std::abs(es.eigenvalues()[i]) - expect) < 1e-10);
            (es.eigenvalues()[i] > 0 ? plus : minus)++;
        }
        CHECK(plus == 4);
        CHECK(minus == 4);
    };
    check_block(*d, {1, 0, 0}, 2 * kPi);
    check_block(*d, {1, 1, 0}, 2 * kPi * std::sqrt(2.0));
    auto d2 = build_torus_domain(2.0 * Eigen::Matrix3d::Identity(), 8);
    check_block(*d2, {1, 0, 0}, 4 * kPi);

    // Galerkin spectrum matches the union of per-mode closed forms
    const SpectralDecomposition s = spectrum(d, 2, 1);
    for (int i = 0; i < s.eigenvalues.size(); ++i) {
        const double mu = s.eigenvalues[i];
        double best = std::abs(mu);  // kernel
        for (const auto& mode : d->modes) {
            if (mode.sin_idx < 0 || mode.k.cwiseAbs().maxCoeff() > 2) continue;
            const double ev = 2 * kPi * (d->frame * mode.k.cast<double>()).norm();
            best = std::min({best, std::abs(mu - ev), std::abs(mu + ev)});
        }
        CHECK(best < 1e-10);
    }
}

TEST_CASE("hessian_apply: H = 0 reduces to dirac, quadratic model, symmetry") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    const Target t{1, 1.0};
    HamiltonianSpec H0;
    H0.n = 1;
    const FieldMap xi = random_bandlimited(d, t, 2, 1.0, 3);
    const FieldMap f0 = constant_field(d, t, Eigen::Vector4d::Zero());
    CHECK((hessian_apply(f0, H0, xi) - dirac_apply(xi)).l2_norm() < 1e-12);

    // separable cosine near its maximum x0 = 0: Hessian = -c Id on the moving axes
    Eigen::VectorXd amp = Eigen::VectorXd::Constant(4, 0.05);
    Eigen::VectorXd shift = Eigen::VectorXd::Zero(4);
    const HamiltonianSpec H = separable_cos(1, amp, shift, 1.0);
    const double c = 4 * kPi * kPi * 0.05;
    const FieldMap xic = constant_field(d, t, Eigen::Vector4d{1, 1, 1, 1});
    const FieldMap hx = hessian_apply(f0, H, xic);
    CHECK((hx - xic * c).l2_norm() < 1e-10);  // D xi = 0, -hess = +c at the maximum
    // at the minimum x0 = (1/2,...,1/2) the quadratic model gives -c xi
    const FieldMap fmin = constant_field(d, t, Eigen::Vector4d{0.5, 0.5, 0.5, 0.5});
    CHECK((hessian_apply(fmin, H, xic) + xic * c).l2_norm() < 1e-10);

    for (std::uint64_t s = 0; s < 5; ++s) {
        const FieldMap f = random_bandlimited(d, t, 2, 0.3, 40 + s);
        const FieldMap a = random_bandlimited(d, t, 2, 1.0, 50 + s);
        const FieldMap b = random_bandlimited(d, t, 2, 1.0, 60 + s);
        const double defect =
            std::abs(inner_kappa(hessian_apply(f, H, a), b) -
                     inner_kappa(a, hessian_apply(f, H, b)));
        CHECK(defect < 1e-10);
    }
}

TEST_CASE("laplace identity on the sphere") {
    auto d = build_sphere_domain(3);
    CHECK(laplace_identity_residual(sphere_identity_field(d)) < 1e-10);
    CHECK(laplace_identity_residual(sphere_y_plus_2ybar_field(d)) < 1e-10);
    CHECK(laplace_identity_residual(hopf_eigenfield(d, ImQuat{1, 0, 0})) < 1e-10);
    for (std::uint64_t s = 0; s < 5; ++s)
        CHECK(laplace_identity_residual(random_bandlimited(d, kH1, 3, 1.0, s)) < 1e-9);

    // independent oracle: Delta f = -sum d_{v_i} d_{v_i} f has eigenvalue
    // d(d+2) on the grade-d eigenfields
    const FieldMap hopf = hopf_eigenfield(d, ImQuat{0, 0, 1});
    FieldMap lap = hopf * 0.0;
    for (int i = 0; i < 3; ++i) lap = lap - reeb_derivative(reeb_derivative(hopf, i), i);
    CHECK((lap - hopf * 8.0).l2_norm() < 1e-10 * hopf.l2_norm());
}

TEST_CASE("poincare constants") {
    auto ds = build_sphere_domain(2);
    CHECK(poincare_constant(*ds, 2, 1) == doctest::Approx(1.0).epsilon(1e-10));
    auto dt = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    CHECK(poincare_constant(*dt, 2, 1) ==
          doctest::Approx(1.0 / (4 * kPi * kPi)).epsilon(1e-10));

    // the inequality holds on random mean-zero fields
    const double c0 = 1.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        FieldMap f = random_bandlimited(ds, kH1, 2, 1.0, 300 + s);
        f = f - constant_field(ds, kH1, mean_value(f));
        const double lhs = f.l2_norm();
        const double rhs = dirac_apply(f).l2_norm();
        CHECK(lhs * lhs <= c0 * rhs * rhs * (1 + 1e-10));
    }
}

TEST_CASE("spectrum rejects an over-asking degree") {
    auto d = build_sphere_domain(2);
    CHECK_THROWS_AS(spectrum(d, 3, 1), ConfigError);
}
