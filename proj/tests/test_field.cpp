#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <numbers>

#include "hkfloer/field.hpp"
#include "hkfloer/io.hpp"

using namespace hkfloer;

namespace {
constexpr double kPi = std::numbers::pi;
const Target kH1{1, std::nullopt};
}  // namespace

TEST_CASE("synthesize/analyze round trip") {
    auto ds = build_sphere_domain(3);
    auto dt = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    for (auto& d : {ds, dt}) {
        const FieldMap f = random_bandlimited(d, kH1, d->degree, 1.0, 42);
        const Eigen::MatrixXd back = analyze(f);
        CHECK((back - f.coeffs).norm() <= 1e-12 * std::max(1.0, f.coeffs.norm()));
        // values reconstructed from analysis coefficients match
        const FieldMap g = synthesize(d, kH1, back);
        CHECK((g.values - f.values).norm() <= 1e-12 * f.values.norm());
    }
}

TEST_CASE("zero coefficients give the zero field") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    const FieldMap f = zero_field(d, kH1);
    CHECK(f.values.norm() == 0.0);
    CHECK(f.l2_norm() == 0.0);
}

TEST_CASE("single torus mode synthesizes cos(2 pi t1)") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    // locate the k = (1,0,0) cosine basis row; basis stores sqrt(2) cos
    int row = -1;
    for (const auto& m : d->modes)
        if (m.k == Eigen::Vector3i(1, 0, 0)) row = m.cos_idx;
    REQUIRE(row > 0);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(4, row + 1);
    c(0, row) = 1.0 / std::numbers::sqrt2;
    const FieldMap f = synthesize(d, kH1, c);
    for (int p = 0; p < d->num_nodes(); ++p)
        CHECK(f.values(0, p) ==
              doctest::Approx(std::cos(2 * kPi * d->nodes(p, 0))).epsilon(1e-12));
}

TEST_CASE("mean values") {
    auto ds = build_sphere_domain(2);
    Eigen::VectorXd c(4);
    c << 0.5, -1.0, 2.0, 0.25;
    CHECK((mean_value(constant_field(ds, kH1, c)) - c).norm() < 1e-12);

    const FieldMap ident = sphere_identity_field(ds);
    CHECK(mean_value(ident).norm() < 1e-12);  // odd symmetry

    auto dt = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    int row = -1;
    for (const auto& m : dt->modes)
        if (m.k == Eigen::Vector3i(1, 0, 0)) row = m.cos_idx;
    Eigen::MatrixXd cm = Eigen::MatrixXd::Zero(4, row + 1);
    cm(1, row) = 1.0;
    CHECK(mean_value(synthesize(dt, kH1, cm)).norm() < 1e-13);
}

TEST_CASE("random band-limited fields: determinism and amplitude") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    CHECK(random_bandlimited(d, kH1, 2, 0.0, 5).l2_norm() == 0.0);
    const FieldMap a = random_bandlimited(d, kH1, 2, 1.0, 7);
    const FieldMap b = random_bandlimited(d, kH1, 2, 1.0, 7);
    CHECK((a.values - b.values).norm() == 0.0);
    const FieldMap c2 = random_bandlimited(d, kH1, 2, 1.0, 8);
    CHECK((a - c2).l2_norm() > 1e-3);
    CHECK(a.coeffs.cwiseAbs().maxCoeff() <= 1.0);
    CHECK_THROWS_AS(random_bandlimited(d, kH1, d->degree + 1, 1.0, 1), ConfigError);
}

TEST_CASE("Parseval on the discrete rule") {
    auto ds = build_sphere_domain(3);
    auto dt = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    for (auto& d : {ds, dt}) {
        for (std::uint64_t seed : {1, 2, 3}) {
            const FieldMap f = random_bandlimited(d, Target{2, std::nullopt}, d->degree, 0.7, seed);
            const double quad = f.l2_norm_quadrature();
            const double spec = f.l2_norm();
            CHECK(std::abs(quad - spec) <= 1e-10 * std::max(1.0, spec));
        }
    }
}

TEST_CASE("Poincare inequality with the first Laplace eigenvalue") {
    auto d = build_sphere_domain(3);
    const double C = 1.0 / std::sqrt(3.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        FieldMap f = random_bandlimited(d, kH1, 3, 1.0, 100 + seed);
        // project out the mean
        const Eigen::VectorXd mean = mean_value(f);
        f = f - constant_field(d, kH1, mean);
        double df2 = 0.0;
        for (int i = 0; i < 3; ++i) df2 += reeb_derivative(f, i).coeffs.squaredNorm();
        CHECK(f.l2_norm() <= C * std::sqrt(df2) * (1.0 + 1e-10));
    }
}

TEST_CASE("non-contractible torus-target map is rejected by mean_value") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    FieldMap f = constant_field(d, Target{1, 1.0}, Eigen::Vector4d::Zero());
    f.contractible = false;
    CHECK_THROWS_AS(mean_value(f), NumericalError);
}

TEST_CASE("field container round trip (binary) and csv") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    FieldMap f = random_bandlimited(d, Target{1, 1.0}, 2, 0.5, 99);
    const std::string bin = "test_field_roundtrip.bin";
    write_field_binary(bin, f);
    const FieldMap g = read_field_binary(bin);
    CHECK((g.values - f.values).norm() < 1e-14);
    CHECK(g.target.lattice.has_value());
    CHECK(*g.target.lattice == doctest::Approx(1.0));
    write_field_csv("test_field_roundtrip.csv", f);
    std::remove(bin.c_str());
    std::remove("test_field_roundtrip.csv");
}
