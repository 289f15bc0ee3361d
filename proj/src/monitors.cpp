#include "hkfloer/monitors.hpp"

#include <cmath>

namespace hkfloer {

namespace {

const std::array<Quat, 3> kFrameQuats = {kQuatI, kQuatJ, kQuatK};

// L g = sum_i d_{v_i} d_{v_i} g for a scalar node field, via projection onto
// the truncated basis (monitor-grade approximation).
Eigen::VectorXd laplace_scalar(const FrameDomain& d, const Eigen::VectorXd& node_values) {
    const Eigen::VectorXd c =
        d.basis_values * d.weights.asDiagonal() * node_values;  // analysis
    Eigen::VectorXd lc = Eigen::VectorXd::Zero(c.size());
    for (int i = 0; i < 3; ++i) lc += d.deriv[i] * (d.deriv[i] * c);
    return d.basis_values.transpose() * lc;  // synthesis
}

Eigen::VectorXd gauss_nodes01(int n, Eigen::VectorXd& w);

}  // namespace

AprioriMonitorReport monitor_apriori(const TrajectorySolution& u, const HamiltonianSpec& H) {
    AprioriMonitorReport rep;
    const auto& d = *u.slices.front().domain;
    const int m = static_cast<int>(u.slices.size());
    const int P = d.num_nodes();
    if (m < 5) throw ConfigError("monitor_apriori: too few slices");
    const double h = u.s_grid[1] - u.s_grid[0];

    // node grids of du/ds, e_u, |du/ds|^2, |du|^2
    std::vector<FieldMap> dus;
    dus.reserve(m);
    for (int i = 0; i < m; ++i) dus.push_back(u.s_derivative(i, H));
    Eigen::MatrixXd e(m, P), w2(m, P), du2(m, P);
    for (int i = 0; i < m; ++i) {
        std::array<Eigen::MatrixXd, 3> dv;
        for (int ax = 0; ax < 3; ++ax)
            dv[ax] = (u.slices[i].coeffs * d.deriv[ax].transpose()) * d.basis_values;
        for (int p = 0; p < P; ++p) {
            double frame = 0.0;
            for (int ax = 0; ax < 3; ++ax) frame += dv[ax].col(p).squaredNorm();
            const double sdot = dus[i].values.col(p).squaredNorm();
            w2(i, p) = sdot;
            e(i, p) = 0.5 * sdot + 0.5 * frame;
            du2(i, p) = sdot + frame;
        }
    }

    // sL g = d^2/ds^2 g + L g at interior slices
    auto space_time_laplace = [&](const Eigen::MatrixXd& g) {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, P);
        for (int i = 1; i + 1 < m; ++i) {
            const Eigen::VectorXd lg = laplace_scalar(d, g.row(i).transpose());
            for (int p = 0; p < P; ++p)
                out(i, p) = (g(i + 1, p) - 2.0 * g(i, p) + g(i - 1, p)) / (h * h) + lg[p];
        }
        return out;
    };
    const Eigen::MatrixXd sLe = space_time_laplace(e);
    const Eigen::MatrixXd sLw = space_time_laplace(w2);

    const double e_floor = 1e-10 * std::max(1.0, e.maxCoeff());
    rep.ler_min_lhs = std::numeric_limits<double>::infinity();
    for (int i = 1; i + 1 < m; ++i)
        for (int p = 0; p < P; ++p) {
            rep.ler_min_lhs = std::min(rep.ler_min_lhs, sLe(i, p));
            rep.ler_fit_A = std::max(rep.ler_fit_A, -sLe(i, p));
            if (e(i, p) > e_floor) {
                rep.ler_fit_B = std::max(rep.ler_fit_B, -sLe(i, p) / std::pow(e(i, p), 1.5));
                rep.ler_fit_C = std::max(rep.ler_fit_C, -sLe(i, p) / e(i, p));
            }
            if (w2(i, p) > e_floor)
                rep.les_fit_C =
                    std::max(rep.les_fit_C, -sLw(i, p) / ((1.0 + du2(i, p)) * w2(i, p)));
        }

    // second-derivative bound: inner window = middle half, r = quarter width
    {
        const int i0 = m / 4, i1 = (3 * m) / 4;
        const int ir = m / 8;
        double sup_dsu = 0.0;
        for (int i = 0; i < m; ++i)
            for (int p = 0; p < P; ++p) sup_dsu = std::max(sup_dsu, std::sqrt(w2(i, p)));
        rep.ddu_constant = 2.0 * H.c_norm(3, &d) * sup_dsu + 2.0 * std::pow(H.c_norm(2, &d), 2);
        double lhs = 0.0;
        const double inv_eps = 1.0 / u.epsilon;
        for (int i = std::max(1, i0); i <= std::min(m - 2, i1); ++i) {
            // covariant s-derivative of du/ds by central differences
            const FieldMap dds = (dus[i + 1] - dus[i - 1]) * (0.5 / h);
            const FieldMap dd = dirac_apply(dus[i]) * inv_eps;
            lhs += h * d.kappa * (dds.coeffs.squaredNorm() + dd.coeffs.squaredNorm());
        }
        double rhs_int = 0.0;
        for (int i = std::max(0, i0 - ir); i <= std::min(m - 1, i1 + ir); ++i)
            rhs_int += h * d.kappa * dus[i].coeffs.squaredNorm();
        const double r = ir * h;
        rep.ddu_lhs = lhs;
        rep.ddu_rhs = (rep.ddu_constant + 4.0 / (r * r)) * rhs_int;
        rep.ddu_holds = lhs <= rep.ddu_rhs * (1.0 + 1e-9);
    }

    // slice-wise derivative bound
    {
        const double grad_bound = H.sup_grad(&d);
        rep.dudsu_min_margin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            double lhs = 0.0, dsu = 0.0;
            for (int p = 0; p < P; ++p) {
                lhs += 0.5 * d.weights[p] * du2(i, p);
                dsu += d.weights[p] * w2(i, p);
            }
            const double rhs = action(u.slices[i]) + d.volume * grad_bound * grad_bound +
                               1.5 * dsu;
            rep.dudsu_min_margin = std::min(rep.dudsu_min_margin, rhs - lhs);
        }
        rep.dudsu_holds = rep.dudsu_min_margin >= -1e-9;
    }
    return rep;
}

SliceCheckReport sphere_slice_check(const FieldMap& f, double r) {
    const auto& d = *f.domain;
    if (d.kind != DomainKind::Sphere3)
        throw ConfigError("sphere_slice_check: sphere domain required");
    SliceCheckReport rep;
    rep.radius = r;
    const int n = f.target.n;

    // right-invariant (ball frame) derivatives at the nodes
    std::array<Eigen::MatrixXd, 3> dr;
    for (int i = 0; i < 3; ++i)
        dr[i] = (f.coeffs * d.deriv_right[i].transpose()) * d.basis_values;

    double e_surf = 0.0, a_surf = 0.0, dsum = 0.0;
    for (int p = 0; p < d.num_nodes(); ++p) {
        double e_p = 0.0;
        for (int i = 0; i < 3; ++i) e_p += dr[i].col(p).squaredNorm();
        e_surf += d.weights[p] * e_p;
        // omega_1(d2, d3) + omega_2(d3, d1) + omega_3(d1, d2), entrywise quaternions
        double a_p = 0.0;
        for (int k = 0; k < n; ++k) {
            auto q_of = [&](const Eigen::MatrixXd& m) {
                return Quat{m(4 * k, p), m(4 * k + 1, p), m(4 * k + 2, p), m(4 * k + 3, p)};
            };
            const Quat d1 = q_of(dr[0]), d2 = q_of(dr[1]), d3 = q_of(dr[2]);
            a_p += qdot(qmul(kFrameQuats[0], d2), d3);
            a_p += qdot(qmul(kFrameQuats[1], d3), d1);
            a_p += qdot(qmul(kFrameQuats[2], d1), d2);
            const Quat sum = qmul(kFrameQuats[0], d1) + qmul(kFrameQuats[1], d2) +
                             qmul(kFrameQuats[2], d3);
            dsum += d.weights[p] * sum.norm2();
        }
        a_surf += d.weights[p] * a_p;
    }
    rep.e_r = r * e_surf;
    rep.a_r = r * r * a_surf;
    rep.iso_margin = r * rep.e_r - rep.a_r;
    rep.iso_holds = rep.iso_margin >= -1e-9 * std::max(1.0, std::abs(rep.a_r));
    rep.are_lhs = rep.e_r + (2.0 / r) * rep.a_r;
    rep.are_rhs = r * dsum;
    rep.are_residual = std::abs(rep.are_lhs - rep.are_rhs);

    // radial extension: int_{B_r} |du|^2 with |du(t)|^2 = |t|^{-2} |df(t/|t|)|^2,
    // by Gauss quadrature in the radius against the surface integral computed
    // with the left (Reeb) frame as the independent route
    Eigen::VectorXd gw;
    const Eigen::VectorXd gx = gauss_nodes01(8, gw);
    double surf_left = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Eigen::MatrixXd di = (f.coeffs * d.deriv[i].transpose()) * d.basis_values;
        for (int p = 0; p < d.num_nodes(); ++p)
            surf_left += d.weights[p] * di.col(p).squaredNorm();
    }
    double ball = 0.0;
    for (int g = 0; g < gx.size(); ++g) {
        const double rho = r * gx[g];
        ball += r * gw[g] * rho * rho * rho * (e_surf / (rho * rho));
    }
    rep.ball_energy = ball;
    rep.ball_identity_rhs = 0.5 * r * r * surf_left;
    rep.ball_residual = std::abs(ball - rep.ball_identity_rhs) /
                        std::max(1e-30, std::abs(rep.ball_identity_rhs));
    return rep;
}

HeinzReport heinz_monitor(const FrameDomain& d, const Eigen::VectorXd& s_grid,
                          const Eigen::MatrixXd& e_slices, double A, double B, double mu_exp,
                          int n_dim) {
    if (n_dim != 3 && n_dim != 4) throw ConfigError("heinz_monitor: n must be 3 or 4");
    if (mu_exp < 1.0 || mu_exp > (n_dim + 2.0) / n_dim)
        throw ConfigError("heinz_monitor: exponent out of range [1, (n+2)/n]");
    if ((e_slices.array() < 0).any())
        throw ConfigError("heinz_monitor: e must be nonnegative");
    HeinzReport rep;
    rep.alpha = 2.0 / (2.0 + n_dim - n_dim * mu_exp);
    const int m = static_cast<int>(e_slices.rows());
    const int P = d.num_nodes();
    const bool static_case = (n_dim == 3);
    if (static_case && m != 1) throw ConfigError("heinz_monitor: static case expects one slice");
    if (!static_case && m < 3) throw ConfigError("heinz_monitor: need at least 3 slices");

    const double h = m > 1 ? s_grid[1] - s_grid[0] : 1.0;
    rep.min_slack = std::numeric_limits<double>::infinity();
    const int lo = static_case ? 0 : 1, hi = static_case ? 0 : m - 2;
    for (int i = lo; i <= hi; ++i) {
        const Eigen::VectorXd lg = laplace_scalar(d, e_slices.row(i).transpose());
        for (int p = 0; p < P; ++p) {
            double sl = lg[p];
            if (!static_case)
                sl += (e_slices(i + 1, p) - 2.0 * e_slices(i, p) + e_slices(i - 1, p)) / (h * h);
            const double slack = sl + A + B * std::pow(e_slices(i, p), mu_exp);
            rep.min_slack = std::min(rep.min_slack, slack);
            rep.sup_e = std::max(rep.sup_e, e_slices(i, p));
        }
    }
    double integral = 0.0;
    for (int i = 0; i < m; ++i)
        for (int p = 0; p < P; ++p)
            integral += (static_case ? 1.0 : h) * d.weights[p] * e_slices(i, p);
    rep.integral_e = integral;
    rep.hypothesis_holds = rep.min_slack >= -1e-9 * std::max(1.0, A + rep.sup_e);
    const double denom =
        A + integral + std::pow(std::pow(B, n_dim / 2.0) * integral, rep.alpha);
    rep.c_empirical = denom > 0 ? rep.sup_e / denom : 0.0;
    return rep;
}

namespace {

Eigen::VectorXd gauss_nodes01(int n, Eigen::VectorXd& w) {
    // Golub-Welsch via the symmetric Jacobi matrix.
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double b = i / std::sqrt(4.0 * i * i - 1.0);
        T(i, i - 1) = T(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    Eigen::VectorXd x(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        x[i] = 0.5 * (es.eigenvalues()[i] + 1.0);
        w[i] = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    }
    return x;
}

}  // namespace

}  // namespace hkfloer
