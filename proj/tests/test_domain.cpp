#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "hkfloer/domain.hpp"
#include "hkfloer/field.hpp"

using namespace hkfloer;

namespace {
constexpr double kPi = std::numbers::pi;
const double kVolS3 = 2.0 * kPi * kPi;
}  // namespace

TEST_CASE("sphere quadrature: volume and coordinate moments") {
    auto d = build_sphere_domain(2);
    CHECK(std::abs(d->weights.sum() - kVolS3) < 1e-12);

    // f == 1 integrates to the volume
    double s = d->weights.sum();
    CHECK(s == doctest::Approx(kVolS3).epsilon(1e-14));

    // int y_mu^2 = Vol/4 by symmetry (quadrature oracle)
    for (int mu = 0; mu < 4; ++mu) {
        double m2 = 0.0;
        for (int p = 0; p < d->num_nodes(); ++p)
            m2 += d->weights[p] * d->nodes(p, mu) * d->nodes(p, mu);
        CHECK(m2 == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-13));
    }

    // nodes are unit quaternions
    for (int p = 0; p < d->num_nodes(); ++p)
        CHECK(std::abs(d->nodes.row(p).squaredNorm() - 1.0) < 1e-14);
}

TEST_CASE("sphere basis: graded harmonics, orthonormal, discarded relations") {
    auto d = build_sphere_domain(3);
    // dim of degree-m spherical harmonics on S^3 is (m+1)^2
    int counts[4] = {0, 0, 0, 0};
    for (int b = 0; b < d->basis_size; ++b) ++counts[d->basis_degree[b]];
    CHECK(counts[0] == 1);
    CHECK(counts[1] == 4);
    CHECK(counts[2] == 9);
    CHECK(counts[3] == 16);
    CHECK(d->basis_size == 30);
    // 35 monomials restricted to 30 dimensions: 5 relations from |y|^2 = 1
    CHECK(d->discarded_directions == 5);

    const Eigen::MatrixXd G =
        d->basis_values * d->weights.asDiagonal() * d->basis_values.transpose();
    CHECK((G - Eigen::MatrixXd::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sphere frame derivatives are skew and exact on the identity field") {
    auto d = build_sphere_domain(2);
    for (int i = 0; i < 3; ++i) {
        const Eigen::MatrixXd& D = d->deriv[i];
        CHECK((D + D.transpose()).cwiseAbs().maxCoeff() < 1e-11);
    }

    // f(y) = y, d_{v_1} f = i y at all nodes
    FieldMap f = sphere_identity_field(d);
    CHECK_FALSE(f.truncation_warning);
    FieldMap df = reeb_derivative(f, 0);
    for (int p = 0; p < d->num_nodes(); ++p) {
        const Quat y{d->nodes(p, 0), d->nodes(p, 1), d->nodes(p, 2), d->nodes(p, 3)};
        const Eigen::Vector4d expect = quat_to_vec(qmul(kQuatI, y));
        CHECK((df.values.col(p) - expect).norm() < 1e-11);
    }

    // degree-2 field f(y) = y*y: product-rule oracle
    // d_{v_i}(y y) = (q_i y) y + y (q_i y)
    Eigen::MatrixXd v(4, d->num_nodes());
    for (int p = 0; p < d->num_nodes(); ++p) {
        const Quat y{d->nodes(p, 0), d->nodes(p, 1), d->nodes(p, 2), d->nodes(p, 3)};
        v.col(p) = quat_to_vec(qmul(y, y));
    }
    FieldMap g = field_from_values(d, Target{1, std::nullopt}, v);
    CHECK_FALSE(g.truncation_warning);
    for (int i = 0; i < 3; ++i) {
        const Quat qi = i == 0 ? kQuatI : (i == 1 ? kQuatJ : kQuatK);
        FieldMap dg = reeb_derivative(g, i);
        for (int p = 0; p < d->num_nodes(); p += 13) {
            const Quat y{d->nodes(p, 0), d->nodes(p, 1), d->nodes(p, 2), d->nodes(p, 3)};
            const Quat qy = qmul(qi, y);
            const Eigen::Vector4d expect = quat_to_vec(qmul(qy, y) + qmul(y, qy));
            CHECK((dg.values.col(p) - expect).norm() < 1e-10);
        }
    }

    FieldMap c = constant_field(d, Target{1, std::nullopt}, Eigen::Vector4d{1, 2, 3, 4});
    for (int i = 0; i < 3; ++i) CHECK(reeb_derivative(c, i).l2_norm() < 1e-12);
}

TEST_CASE("divergence-free frame: integrals of derivatives vanish, skew-adjointness") {
    auto d = build_sphere_domain(3);
    const Target t{1, std::nullopt};
    for (int seed = 0; seed < 5; ++seed) {
        FieldMap f = random_bandlimited(d, t, 3, 1.0, 100 + seed);
        FieldMap g = random_bandlimited(d, t, 3, 1.0, 200 + seed);
        for (int i = 0; i < 3; ++i) {
            const FieldMap df = reeb_derivative(f, i);
            // int d_{v_i} f kappa dvol = 0 (kappa constant)
            const Eigen::VectorXd m = df.values * d->weights;
            CHECK(m.cwiseAbs().maxCoeff() < 1e-11);
            // skew-adjointness in the kappa-weighted product
            const double s = inner_kappa(df, g) + inner_kappa(f, reeb_derivative(g, i));
            CHECK(std::abs(s) < 1e-10);
        }
    }
}

TEST_CASE("sphere Reeb fields are pointwise orthonormal") {
    auto d = build_sphere_domain(1);
    for (int p = 0; p < d->num_nodes(); ++p) {
        for (int i = 0; i < 3; ++i) {
            const Eigen::VectorXd vi = d->frame_vector(i, p);
            CHECK(vi.norm() == doctest::Approx(1.0).epsilon(1e-13));
            for (int j = i + 1; j < 3; ++j)
                CHECK(std::abs(vi.dot(d->frame_vector(j, p))) < 1e-13);
        }
    }
}

TEST_CASE("hypercontact verification on the standard sphere") {
    auto d = build_sphere_domain(2);
    const HypercontactReport r = verify_hypercontact(*d);
    CHECK(r.max_alpha_pairing < 1e-12);
    CHECK(r.max_dalpha < 1e-12);
    CHECK(r.max_mu < 1e-12);
    CHECK(r.max_star < 1e-12);
    CHECK(r.kappa == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.max_bracket == 0.0);  // closed form, exact
    CHECK(r.max_violation() < 1e-12);
}

TEST_CASE("torus domain: volume, commuting frame, sheared frame derivative") {
    auto d = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    CHECK(d->volume == doctest::Approx(1.0));
    CHECK(d->weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
    const HypercontactReport r = verify_hypercontact(*d);
    CHECK(r.max_alpha_pairing < 1e-12);
    CHECK(r.max_bracket == 0.0);

    // A with rows (1,1,0),(0,1,0),(0,0,1): v_1 = d_1 + d_2 on sin(2 pi t_1)
    Eigen::Matrix3d A;
    A << 1, 1, 0, 0, 1, 0, 0, 0, 1;
    auto ds = build_torus_domain(A, 8);
    Eigen::MatrixXd v(4, ds->num_nodes());
    for (int p = 0; p < ds->num_nodes(); ++p) {
        v.col(p).setZero();
        v(0, p) = std::sin(2 * kPi * ds->nodes(p, 0));
    }
    FieldMap f = field_from_values(ds, Target{1, std::nullopt}, v);
    CHECK_FALSE(f.truncation_warning);
    FieldMap df = reeb_derivative(f, 0);
    // finite-difference oracle along v_1 = d_1 + d_2 (function is t_2-free)
    for (int p = 0; p < ds->num_nodes(); ++p) {
        const double expect = 2 * kPi * std::cos(2 * kPi * ds->nodes(p, 0));
        CHECK(df.values(0, p) == doctest::Approx(expect).epsilon(1e-11));
    }
}

TEST_CASE("torus domain rejects bad input") {
    CHECK_THROWS_AS(build_torus_domain(Eigen::Matrix3d::Zero(), 8), ConfigError);
    CHECK_THROWS_AS(build_torus_domain(Eigen::Matrix3d::Identity(), 5), ConfigError);
    CHECK_THROWS_AS(build_sphere_domain(2, 3), ConfigError);
}

TEST_CASE("hopf map values and derivative identities") {
    const ImQuat li{1, 0, 0};
    // h(1) = -lambda
    const ImQuat h1 = hopf_map(li, kQuatOne);
    CHECK(h1.x == doctest::Approx(-1.0));
    CHECK(std::abs(h1.y) + std::abs(h1.z) < 1e-15);
    // lambda = i, y = j -> j i j = i (qmul oracle)
    const Quat oracle = qmul(qmul(kQuatJ, kQuatI), kQuatJ);
    const ImQuat hj = hopf_map(li, kQuatJ);
    CHECK((hj.as_quat() - oracle).norm() < 1e-15);

    // d_{v_j} h_i = 2 h_k at random nodes, by finite differences along the flow
    auto d = build_sphere_domain(2);
    const ImQuat lams[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const Quat qs[3] = {kQuatI, kQuatJ, kQuatK};
    const double h = 1e-6;
    int checked = 0;
    for (int p = 0; p < d->num_nodes() && checked < 100; p += 7, ++checked) {
        const Quat y{d->nodes(p, 0), d->nodes(p, 1), d->nodes(p, 2), d->nodes(p, 3)};
        for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3, k = (i + 2) % 3;
            auto flow = [&](int axis, double t) {
                const Quat step{std::cos(t), qs[axis].x * std::sin(t), qs[axis].y * std::sin(t),
                                qs[axis].z * std::sin(t)};
                return qmul(step, y);
            };
            // d_{v_i} h_i = 0
            const Quat dii = (hopf_map(lams[i], flow(i, h)).as_quat() -
                              hopf_map(lams[i], flow(i, -h)).as_quat()) *
                             (0.5 / h);
            CHECK(dii.norm() < 1e-8);
            // d_{v_j} h_i = 2 h_k
            const Quat dji = (hopf_map(lams[i], flow(j, h)).as_quat() -
                              hopf_map(lams[i], flow(j, -h)).as_quat()) *
                             (0.5 / h);
            const Quat expect = hopf_map(lams[k], y).as_quat() * 2.0;
            CHECK((dji - expect).norm() < 1e-7);
        }
    }
    CHECK(checked == 100);
}

TEST_CASE("hopf maps are unit imaginary") {
    std::mt19937_64 rng(5);
    auto u01 = [&] { return (rng() >> 11) * 0x1.0p-53; };
    for (int it = 0; it < 50; ++it) {
        Quat y{2 * u01() - 1, 2 * u01() - 1, 2 * u01() - 1, 2 * u01() - 1};
        const double n = y.norm();
        y = y * (1.0 / n);
        const ImQuat lam{0, 0, 1};
        CHECK(hopf_map(lam, y).norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(hopf_map_mirror(lam, y).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}
