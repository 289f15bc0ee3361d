#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "hkfloer/specflow.hpp"

using namespace hkfloer;

namespace {
const Target kT4{1, 1.0};

HamiltonianSpec default_h() {
    Eigen::VectorXd amp(4), shift(4);
    amp << 0.05, 0.06, 0.07, 0.08;
    shift.setZero();
    return separable_cos(1, amp, shift, 1.0);
}

OperatorFamily synthetic_family(const Eigen::VectorXd& diag, double shift_amp) {
    OperatorFamily fam;
    fam.size = static_cast<int>(diag.size());
    fam.blocks_at = [diag, shift_amp](double t) {
        std::vector<Eigen::MatrixXd> blocks;
        Eigen::MatrixXd m = diag.asDiagonal();
        m += (2.0 * t - 1.0) * shift_amp * Eigen::MatrixXd::Identity(diag.size(), diag.size());
        blocks.push_back(m);
        return blocks;
    };
    return fam;
}
}  // namespace

TEST_CASE("constant invertible family has zero flow") {
    Eigen::VectorXd diag(4);
    diag << -2.0, -0.5, 0.7, 3.0;
    const auto r = spectral_flow(synthetic_family(diag, 0.0));
    CHECK(r.flow == 0);
}

TEST_CASE("one simple eigenvalue crossing upward counts +1") {
    // eigenvalues d_i + (2t-1) s: with s = 1, -0.5 crosses upward, nothing else
    Eigen::VectorXd diag(4);
    diag << -5.0, -0.5, 2.0, 7.0;
    const auto r = spectral_flow(synthetic_family(diag, 1.0));
    CHECK(r.flow == 1);

    // downward crossing: reverse the path by flipping the shift sign
    OperatorFamily rev;
    rev.size = 4;
    rev.blocks_at = [diag](double t) {
        std::vector<Eigen::MatrixXd> blocks;
        Eigen::MatrixXd m = diag.asDiagonal();
        m += (1.0 - 2.0 * t) * Eigen::MatrixXd::Identity(4, 4);
        blocks.push_back(m);
        return blocks;
    };
    CHECK(spectral_flow(rev).flow == -1);
}

TEST_CASE("concatenation of a path and its reverse has zero flow") {
    Eigen::VectorXd diag(3);
    diag << -1.0, -0.3, 0.2;
    OperatorFamily fam;
    fam.size = 3;
    fam.blocks_at = [diag](double t) {
        const double s = t < 0.5 ? 2.0 * t : 2.0 * (1.0 - t);
        std::vector<Eigen::MatrixXd> blocks;
        Eigen::MatrixXd m = diag.asDiagonal();
        m += s * 0.8 * Eigen::MatrixXd::Identity(3, 3);
        blocks.push_back(m);
        return blocks;
    };
    CHECK(spectral_flow(fam).flow == 0);
}

TEST_CASE("degenerate endpoint raises") {
    Eigen::VectorXd diag(3);
    diag << -1.0, 0.0, 2.0;
    CHECK_THROWS_AS(spectral_flow(synthetic_family(diag, 0.0)), NumericalError);
}

TEST_CASE("floer index equals dim X - morse index on the separable T4 Hamiltonian") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    const HamiltonianSpec H = default_h();
    // critical points have coordinates in {0, 1/2}; index = #coordinates at 0
    for (int mask = 0; mask < 16; ++mask) {
        Eigen::VectorXd x(4);
        int ind = 0;
        for (int i = 0; i < 4; ++i) {
            const bool at_max = (mask >> i) & 1;
            x[i] = at_max ? 0.0 : 0.5;
            if (at_max) ++ind;
        }
        const FloerIndexResult r = floer_index(d, kT4, x, H, 3);
        CHECK(r.mu == 4 - ind);
        CHECK(r.mu == r.mu_coarser);
    }
}

TEST_CASE("floer index on the sphere domain for a constant critical point") {
    auto d = build_sphere_domain(2);
    const HamiltonianSpec H = default_h();
    Eigen::VectorXd x(4);
    x << 0.5, 0.5, 0.5, 0.5;  // minimum: index 0, mu = 4
    const FloerIndexResult r = floer_index(d, kT4, x, H, 2);
    CHECK(r.mu == 4);
    x << 0.0, 0.5, 0.5, 0.5;  // one maximum direction: index 1, mu = 3
    CHECK(floer_index(d, kT4, x, H, 2).mu == 3);
}

TEST_CASE("index is stable under t-grid refinement") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    const HamiltonianSpec H = default_h();
    Eigen::VectorXd x = Eigen::VectorXd::Constant(4, 0.5);
    const double eps = default_epsilon(*d, 2, 1);
    const OperatorFamily fam = hessian_family_constant(d, kT4, x, H, eps, 2);
    CHECK(spectral_flow(fam, 6).flow == spectral_flow(fam, 48).flow);
}

TEST_CASE("degenerate Hessian of H is rejected") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    const HamiltonianSpec H = default_h();
    Eigen::VectorXd x(4);
    x << 0.25, 0.5, 0.5, 0.5;  // cos''(2 pi /4) = 0 in the first coordinate
    CHECK_THROWS_AS(floer_index(d, kT4, x, H, 2), NumericalError);
}

TEST_CASE("closed loops have zero flow") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    const HamiltonianSpec H = default_h();
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(4, 0.5);

    OperatorFamily translate;
    translate.blocks_at = [d, H, x](double t) {
        Eigen::VectorXd xt = x;
        xt[0] += t;  // full lattice period
        return hessian_family_constant(d, kT4, xt, H, 0.0, 2).blocks_at(1.0);
    };
    CHECK(loop_flow_check(translate) == 0);

    OperatorFamily hloop;
    hloop.blocks_at = [d, H, x](double t) {
        HamiltonianSpec Ht = H;
        HamTerm extra;
        extra.amplitude = 0.02 * std::sin(std::numbers::pi * t);
        extra.target_freq = Eigen::VectorXi::Zero(4);
        extra.target_freq[0] = 1;
        extra.domain_basis = 1;
        Ht.terms.push_back(extra);
        return hessian_family_constant(d, kT4, x, Ht, 0.0, 1).blocks_at(1.0);
    };
    CHECK(loop_flow_check(hloop) == 0);
}
