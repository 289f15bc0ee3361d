#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "hkfloer/action.hpp"

using namespace hkfloer;

namespace {
constexpr double kPi = std::numbers::pi;
const double kPi2 = kPi * kPi;
const Target kH1{1, std::nullopt};

// independent quadrature oracle for A(f) = (1/2) int <f, Df> kappa dvol
double action_quadrature_oracle(const FieldMap& f) {
    const FieldMap df = dirac_apply(f);
    double s = 0.0;
    for (int p = 0; p < f.domain->num_nodes(); ++p)
        s += f.domain->weights[p] * f.values.col(p).dot(df.values.col(p));
    return 0.5 * f.domain->kappa * s;
}

}  // namespace

TEST_CASE("action values: constants, the identity field, a single torus mode") {
    auto d = build_sphere_domain(2);
    CHECK(std::abs(action(constant_field(d, kH1, Eigen::Vector4d{1, 2, 3, 4}))) < 1e-12);

    const FieldMap ident = sphere_identity_field(d);
    CHECK(action(ident) == doctest::Approx(-6.0 * kPi2).epsilon(1e-12));
    CHECK(action_quadrature_oracle(ident) == doctest::Approx(-6.0 * kPi2).epsilon(1e-12));

    auto dt = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    int row = -1;
    for (const auto& m : dt->modes)
        if (m.k == Eigen::Vector3i(1, 0, 0)) row = m.cos_idx;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(4, row + 1);
    c(1, row) = 1.0 / std::numbers::sqrt2;  // q = i times cos(2 pi t1)
    const FieldMap mode = synthesize(dt, kH1, c);
    CHECK(std::abs(action(mode)) < 1e-12);
    CHECK(std::abs(action_quadrature_oracle(mode)) < 1e-12);
}

TEST_CASE("energy values") {
    auto d = build_sphere_domain(2);
    CHECK(energy(constant_field(d, kH1, Eigen::Vector4d{1, 0, 0, 0})) == 0.0);
    CHECK(energy(sphere_identity_field(d)) == doctest::Approx(3.0 * kPi2).epsilon(1e-12));

    auto dt = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    int row = -1;
    for (const auto& m : dt->modes)
        if (m.k == Eigen::Vector3i(1, 0, 0)) row = m.cos_idx;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(4, row + 1);
    c(1, row) = 1.0 / std::numbers::sqrt2;
    CHECK(energy(synthesize(dt, kH1, c)) == doctest::Approx(kPi2).epsilon(1e-12));
}

TEST_CASE("perturbed action") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    const Target t{1, 1.0};
    Eigen::VectorXd amp(4), shift(4);
    amp << 0.05, 0.06, 0.07, 0.08;
    shift.setZero();
    const HamiltonianSpec H = separable_cos(1, amp, shift, 1.0);

    HamiltonianSpec H0;
    H0.n = 1;
    const FieldMap f = random_bandlimited(d, t, 2, 0.4, 11);
    CHECK(perturbed_action(f, H0) == doctest::Approx(action(f)).epsilon(1e-13));

    // constant x: A_H = -kappa Vol H(x)
    Eigen::VectorXd x(4);
    x << 0.1, 0.2, 0.3, 0.4;
    const FieldMap fc = constant_field(d, t, x);
    CHECK(perturbed_action(fc, H) ==
          doctest::Approx(-d->kappa * d->volume * H.eval(x)).epsilon(1e-12));

    // independent two-term quadrature oracle on a random field
    double hint = 0.0;
    for (int p = 0; p < d->num_nodes(); ++p)
        hint += d->weights[p] * H.eval(f.values.col(p));
    const double oracle = action_quadrature_oracle(f) - d->kappa * hint;
    CHECK(perturbed_action(f, H) == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("action gradient: eigenfield, critical constant, finite differences") {
    auto d = build_sphere_domain(2);
    const FieldMap ident = sphere_identity_field(d);
    CHECK((action_gradient(ident) - ident * (-3.0)).l2_norm() < 1e-11);

    auto dt = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    const Target t{1, 1.0};
    Eigen::VectorXd amp(4), shift(4);
    amp << 0.05, 0.06, 0.07, 0.08;
    shift.setZero();
    const HamiltonianSpec H = separable_cos(1, amp, shift, 1.0);
    // critical constant (gradient of H vanishes at half-lattice points)
    Eigen::VectorXd x(4);
    x << 0.0, 0.5, 0.0, 0.5;
    CHECK(action_gradient(constant_field(dt, t, x), &H).l2_norm() < 1e-12);

    // one-sided finite difference of A_H matches <xi, grad>_kappa with O(t) error
    const FieldMap f = random_bandlimited(dt, t, 2, 0.3, 21);
    const FieldMap xi = random_bandlimited(dt, t, 2, 1.0, 22);
    const double t1 = 1e-5;
    const double fd = (perturbed_action(f + xi * t1, H) - perturbed_action(f, H)) / t1;
    const double pairing = inner_kappa(xi, action_gradient(f, &H));
    CHECK(std::abs(fd - pairing) < 1e-3 * std::max(1.0, std::abs(pairing)));

    // central differences: error <= 1e-7 at step 1e-4
    const double t2 = 1e-4;
    const double cd =
        (perturbed_action(f + xi * t2, H) - perturbed_action(f - xi * t2, H)) / (2 * t2);
    CHECK(std::abs(cd - pairing) <= 1e-7 * std::max(1.0, std::abs(pairing)));
}

TEST_CASE("Cartan energy identity") {
    auto d = build_sphere_domain(3);
    CHECK(energy_identity_residual(constant_field(d, kH1, Eigen::Vector4d{1, 2, 3, 4})) <
          1e-12);
    // f(y) = y: E = 3 pi^2, A = -6 pi^2, (1/2) int |Df|^2 = 9 pi^2
    const FieldMap ident = sphere_identity_field(d);
    CHECK(energy_identity_residual(ident) < 1e-9);
    for (std::uint64_t s = 0; s < 100; ++s) {
        const FieldMap f = random_bandlimited(d, kH1, 3, 1.0, 1000 + s);
        CHECK(energy_identity_residual(f) <= 1e-8 * (1.0 + std::abs(energy(f))));
    }
}

TEST_CASE("torus energy equals half the Dirac square norm on contractible fields") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const FieldMap f = random_bandlimited(d, kH1, 3, 1.0, 50 + s);
        const double e = energy(f);
        const double q = 0.5 * dirac_apply(f).coeffs.squaredNorm();
        CHECK(std::abs(e - q) <= 1e-8 * std::max(1.0, e));
    }
}

TEST_CASE("apriori action bound") {
    auto d = build_sphere_domain(2);
    const double c0 = poincare_constant(*d, 2, 1);
    const AprioriReport r0 =
        apriori_bound_check(constant_field(d, kH1, Eigen::Vector4d::Zero()), c0);
    CHECK(r0.holds);
    CHECK(r0.dirac_sq == doctest::Approx(0.0));

    const AprioriReport ri = apriori_bound_check(sphere_identity_field(d), c0);
    CHECK(ri.holds);
    CHECK(ri.action_value == doctest::Approx(-6 * kPi2).epsilon(1e-10));
    CHECK(ri.dirac_sq == doctest::Approx(18 * kPi2).epsilon(1e-10));

    for (std::uint64_t s = 0; s < 100; ++s)
        CHECK(apriori_bound_check(random_bandlimited(d, kH1, 2, 1.0, 2000 + s), c0).holds);
}

TEST_CASE("non-contractible torus maps are rejected") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    FieldMap f = constant_field(d, Target{1, 1.0}, Eigen::Vector4d::Zero());
    f.contractible = false;
    CHECK_THROWS_AS(action(f), NumericalError);
}

TEST_CASE("action decreases along a numerically integrated gradient descent path") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    const Target t{1, 1.0};
    Eigen::VectorXd amp(4), shift(4);
    amp << 0.05, 0.06, 0.07, 0.08;
    shift.setZero();
    const HamiltonianSpec H = separable_cos(1, amp, shift, 1.0);
    FieldMap f = random_bandlimited(d, t, 1, 0.05, 77);
    double prev = perturbed_action(f, H);
    const double dt_step = 1e-3;
    for (int it = 0; it < 50; ++it) {
        const FieldMap g = action_gradient(f, &H);
        f = f - g * dt_step;
        const double now = perturbed_action(f, H);
        CHECK(now <= prev + 1e-12);
        prev = now;
    }
}

TEST_CASE("hamiltonian evaluators are mutually consistent") {
    Eigen::VectorXd amp(4), shift(4);
    amp << 0.05, 0.06, 0.07, 0.08;
    shift << 0.1, 0.0, 0.25, 0.0;
    HamiltonianSpec H = separable_mixed(1, amp, shift, {1}, 1.0);
    std::mt19937_64 gen(5);
    for (int it = 0; it < 20; ++it) {
        Eigen::VectorXd x(4);
        for (int i = 0; i < 4; ++i) x[i] = uniform01(gen());
        const double h = 1e-6;
        const Eigen::VectorXd g = H.grad(x);
        const Eigen::MatrixXd hess = H.hess(x);
        for (int i = 0; i < 4; ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            CHECK(std::abs((H.eval(xp) - H.eval(xm)) / (2 * h) - g[i]) < 1e-6);
            const Eigen::VectorXd gdiff = (H.grad(xp) - H.grad(xm)) / (2 * h);
            for (int j = 0; j < 4; ++j) CHECK(std::abs(gdiff[j] - hess(i, j)) < 1e-6);
        }
    }
    CHECK(H.c_norm(0) <= H.c_norm(1));
    CHECK(H.c_norm(1) <= H.c_norm(2));
    CHECK(H.c_norm(2) <= H.c_norm(3));
}
