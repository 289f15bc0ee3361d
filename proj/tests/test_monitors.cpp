#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "hkfloer/monitors.hpp"

using namespace hkfloer;

namespace {
constexpr double kPi = std::numbers::pi;
const double kPi2 = kPi * kPi;
const Target kH1{1, std::nullopt};
const Target kT4{1, 1.0};

HamiltonianSpec default_h() {
    Eigen::VectorXd amp(4), shift(4);
    amp << 0.05, 0.06, 0.07, 0.08;
    shift.setZero();
    return separable_cos(1, amp, shift, 1.0);
}

TrajectorySolution solve_default_orbit(double eps) {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 4, 1);
    const HamiltonianSpec H = default_h();
    NewtonOptions nopt;
    nopt.report_degree = 1;
    const auto pts = find_critical_points(H, d, kT4, critical_seeds(H, d, kT4), nopt);
    const CriticalPoint *mn = nullptr, *sd = nullptr;
    for (const auto& p : pts)
        if (p.mu == 4) mn = &p;
    for (const auto& p : pts)
        if (p.mu == 3 && !sd && morse_trajectories(mn->point(), p.point(), H).count > 0)
            sd = &p;
    BvpOptions opt;
    opt.slices_per_unit = 12;
    return connect_orbit_bvp(*mn, *sd, H, eps, opt);
}
}  // namespace

TEST_CASE("apriori monitors on a constant trajectory") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 4, 1);
    const HamiltonianSpec H = default_h();
    NewtonOptions nopt;
    nopt.report_degree = 1;
    const auto pts = find_critical_points(H, d, kT4, critical_seeds(H, d, kT4), nopt);
    const TrajectorySolution triv = connect_orbit_bvp(pts[0], pts[0], H, 0.1);
    const AprioriMonitorReport rep = monitor_apriori(triv, H);
    // all left-hand sides vanish: the inequalities hold with A = B = 0
    CHECK(rep.ler_fit_A <= 1e-10);
    CHECK(rep.ler_fit_B <= 1e-6);
    CHECK(rep.ddu_holds);
    CHECK(rep.ddu_lhs <= 1e-12);
    CHECK(rep.dudsu_holds);
}

TEST_CASE("apriori monitors on a Morse-regime orbit") {
    const TrajectorySolution sol = solve_default_orbit(0.1);
    const HamiltonianSpec H = default_h();
    const AprioriMonitorReport rep = monitor_apriori(sol, H);
    CHECK(rep.ddu_holds);  // with the stated constant
    CHECK(rep.ddu_constant > 0.0);
    CHECK(rep.dudsu_holds);  // slice-wise with the 3/2 coefficient
    CHECK(rep.dudsu_min_margin >= 0.0);

    // Heinz hypothesis with the fitted constants on the energy density
    auto d = sol.slices.front().domain;
    const int m = static_cast<int>(sol.slices.size());
    Eigen::MatrixXd e(m, d->num_nodes());
    for (int i = 0; i < m; ++i) {
        const FieldMap du = sol.s_derivative(i, H);
        std::array<Eigen::MatrixXd, 3> dv;
        for (int ax = 0; ax < 3; ++ax)
            dv[ax] = (sol.slices[i].coeffs * d->deriv[ax].transpose()) * d->basis_values;
        for (int p = 0; p < d->num_nodes(); ++p) {
            double frame = 0.0;
            for (int ax = 0; ax < 3; ++ax) frame += dv[ax].col(p).squaredNorm();
            e(i, p) = 0.5 * du.values.col(p).squaredNorm() + 0.5 * frame;
        }
    }
    const HeinzReport hz =
        heinz_monitor(*d, sol.s_grid, e, rep.ler_fit_A, rep.ler_fit_B, 1.5, 4);
    CHECK(hz.hypothesis_holds);
    CHECK(hz.alpha == doctest::Approx(2.0).epsilon(1e-12));  // n=4, mu=3/2
    CHECK(hz.c_empirical >= 0.0);
}

TEST_CASE("heinz monitor basics") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 4, 1);
    // n = 3, mu = 3/2 gives alpha = 4
    Eigen::MatrixXd e = Eigen::MatrixXd::Constant(1, d->num_nodes(), 0.7);
    const HeinzReport hz = heinz_monitor(*d, Eigen::VectorXd::Zero(1), e, 0.0, 0.0, 1.5, 3);
    CHECK(hz.alpha == doctest::Approx(4.0));
    CHECK(hz.hypothesis_holds);  // constant field: sL e = 0 >= 0
    CHECK(hz.sup_e == doctest::Approx(0.7));

    CHECK_THROWS_AS(
        heinz_monitor(*d, Eigen::VectorXd::Zero(1), e, 0.0, 0.0, 3.0, 3), ConfigError);
    Eigen::MatrixXd bad = e;
    bad(0, 0) = -1.0;
    CHECK_THROWS_AS(
        heinz_monitor(*d, Eigen::VectorXd::Zero(1), bad, 0.0, 0.0, 1.5, 3), ConfigError);
}

TEST_CASE("sphere slice check: constants, the identity field, random fields") {
    auto d = build_sphere_domain(2);
    const FieldMap c = constant_field(d, kH1, Eigen::Vector4d{1, 2, 3, 4});
    const SliceCheckReport rc = sphere_slice_check(c, 1.0);
    CHECK(rc.a_r == doctest::Approx(0.0));
    CHECK(rc.e_r == doctest::Approx(0.0));

    const FieldMap ident = sphere_identity_field(d);
    const SliceCheckReport ri = sphere_slice_check(ident, 1.0);
    CHECK(ri.e_r == doctest::Approx(6 * kPi2).epsilon(1e-12));
    CHECK(ri.iso_holds);
    CHECK(ri.are_residual < 1e-9 * std::max(1.0, std::abs(ri.are_lhs)));
    // radial identity: both sides 3 pi^2 at r = 1
    CHECK(ri.ball_energy == doctest::Approx(3 * kPi2).epsilon(1e-10));
    CHECK(ri.ball_identity_rhs == doctest::Approx(3 * kPi2).epsilon(1e-10));
    CHECK(ri.ball_residual < 1e-10);

    // scaling in r
    const SliceCheckReport rh = sphere_slice_check(ident, 0.5);
    CHECK(rh.ball_energy == doctest::Approx(0.25 * 3 * kPi2).epsilon(1e-10));
    CHECK(rh.iso_holds);

    for (std::uint64_t s = 0; s < 100; ++s) {
        const FieldMap f = random_bandlimited(d, kH1, 2, 1.0, 4000 + s);
        const SliceCheckReport r = sphere_slice_check(f, 1.0);
        CHECK(r.iso_holds);
        CHECK(r.ball_residual <= 1e-8);
        CHECK(r.are_residual <= 1e-9 * std::max(1.0, std::abs(r.are_lhs)));
    }
}
