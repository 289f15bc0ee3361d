#include "hkfloer/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hkfloer {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes/weights on [0, 1] (Newton iteration on P_n).
void gauss_legendre01(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double p0 = 0.0, p1 = 0.0;
        for (int it = 0; it < 100; ++it) {
            p0 = 1.0;
            p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * t * p1 - j * p2) / (j + 1);
            }
            const double dp = n * (t * p0 - p1) / (t * t - 1.0);
            const double dt = p0 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        p1 = 0.0;
        p0 = 1.0;
        for (int j = 0; j < n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2 * j + 1) * t * p1 - j * p2) / (j + 1);
        }
        const double dp = n * (t * p0 - p1) / (t * t - 1.0);
        x[n - 1 - i] = 0.5 * (t + 1.0);
        w[n - 1 - i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
}

// Multi-indices (e0,e1,e2,e3) of exact total degree m, lexicographic.
std::vector<std::array<int, 4>> multi_indices(int m) {
    std::vector<std::array<int, 4>> out;
    for (int a = m; a >= 0; --a)
        for (int b = m - a; b >= 0; --b)
            for (int c = m - a - b; c >= 0; --c) out.push_back({a, b, c, m - a - b - c});
    return out;
}

struct MonomialTable {
    std::vector<std::array<int, 4>> idx;   // all degrees 0..d, grouped by degree
    std::vector<int> degree_offset;        // start of each degree block
    std::vector<int> degree;               // per monomial

    int find(const std::array<int, 4>& a) const {
        const int m = a[0] + a[1] + a[2] + a[3];
        for (int p = degree_offset[m]; p < degree_offset[m + 1]; ++p)
            if (idx[p] == a) return p;
        return -1;
    }
};

MonomialTable build_monomials(int d) {
    MonomialTable t;
    t.degree_offset.push_back(0);
    for (int m = 0; m <= d; ++m) {
        auto block = multi_indices(m);
        for (const auto& a : block) {
            t.idx.push_back(a);
            t.degree.push_back(m);
        }
        t.degree_offset.push_back(static_cast<int>(t.idx.size()));
    }
    return t;
}

// Derivation matrix of the linear flow y -> exp(Q t) y on monomial coefficients:
// d(y^alpha) = sum_mu alpha_mu (Q y)_mu y^(alpha - e_mu).
Eigen::MatrixXd flow_derivation(const MonomialTable& t, const Eigen::Matrix4d& Q) {
    const int n = static_cast<int>(t.idx.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int b = 0; b < n; ++b) {
        const auto& alpha = t.idx[b];
        for (int mu = 0; mu < 4; ++mu) {
            if (alpha[mu] == 0) continue;
            for (int nu = 0; nu < 4; ++nu) {
                if (Q(mu, nu) == 0.0) continue;
                auto beta = alpha;
                beta[mu] -= 1;
                beta[nu] += 1;
                A(t.find(beta), b) += alpha[mu] * Q(mu, nu);
            }
        }
    }
    return A;
}

const std::array<Quat, 3> kFrameQuats = {kQuatI, kQuatJ, kQuatK};

}  // namespace

int FrameDomain::basis_size_for_degree(int deg) const {
    int b = 0;
    while (b < basis_size && basis_degree[b] <= deg) ++b;
    return b;
}

Eigen::VectorXd FrameDomain::frame_vector(int axis, int node) const {
    if (kind == DomainKind::Sphere3) {
        const Quat y{nodes(node, 0), nodes(node, 1), nodes(node, 2), nodes(node, 3)};
        return quat_to_vec(qmul(kFrameQuats[axis], y));
    }
    return frame.row(axis).transpose();
}

int torus_max_degree(int N) { return (N - 1) / 2; }

std::shared_ptr<const FrameDomain> build_sphere_domain(int degree, int res_angle,
                                                       int res_radial) {
    if (degree < 1) throw ConfigError("sphere domain: degree must be >= 1");
    if (res_angle == 0) res_angle = 2 * degree + 2;
    if (res_radial == 0) res_radial = degree + 2;
    if (res_angle < 2 * degree + 1)
        throw ConfigError("sphere domain: angular resolution below exactness threshold");
    if (2 * res_radial - 1 < degree)
        throw ConfigError("sphere domain: radial resolution below exactness threshold");

    auto dom = std::make_shared<FrameDomain>();
    FrameDomain& d = *dom;
    d.kind = DomainKind::Sphere3;
    d.degree = degree;
    d.kappa = 2.0;
    d.res_angle = res_angle;
    d.res_radial = res_radial;

    // Hopf coordinates: y0 + i y1 = sqrt(1-s) e^{i xi1}, y2 + i y3 = sqrt(s) e^{i xi2},
    // dvol = (1/2) ds dxi1 dxi2.
    Eigen::VectorXd gs, gw;
    gauss_legendre01(res_radial, gs, gw);
    const int P = res_radial * res_angle * res_angle;
    d.nodes.resize(P, 4);
    d.weights.resize(P);
    int p = 0;
    for (int a = 0; a < res_radial; ++a) {
        const double s = gs[a];
        const double r1 = std::sqrt(1.0 - s), r2 = std::sqrt(s);
        const double ws = 0.5 * gw[a] * (2.0 * kPi / res_angle) * (2.0 * kPi / res_angle);
        for (int b = 0; b < res_angle; ++b) {
            const double x1 = 2.0 * kPi * b / res_angle;
            for (int c = 0; c < res_angle; ++c) {
                const double x2 = 2.0 * kPi * c / res_angle;
                d.nodes.row(p) << r1 * std::cos(x1), r1 * std::sin(x1), r2 * std::cos(x2),
                    r2 * std::sin(x2);
                d.weights[p] = ws;
                ++p;
            }
        }
    }
    d.volume = d.weights.sum();

    // Monomial values at nodes.
    const MonomialTable table = build_monomials(degree);
    const int M = static_cast<int>(table.idx.size());
    Eigen::MatrixXd V(M, P);
    for (int m = 0; m < M; ++m) {
        const auto& a = table.idx[m];
        for (int q = 0; q < P; ++q) {
            double v = 1.0;
            for (int mu = 0; mu < 4; ++mu)
                for (int e = 0; e < a[mu]; ++e) v *= d.nodes(q, mu);
            V(m, q) = v;
        }
    }
    const Eigen::MatrixXd G = V * d.weights.asDiagonal() * V.transpose();

    // Graded orthonormalization: new directions at degree m are the degree-m
    // spherical harmonics; directions generated by |y|^2 relations fall below
    // the Gram threshold and are discarded.
    Eigen::MatrixXd T(M, M);   // basis rows in monomial coordinates
    Eigen::MatrixXd Phi(M, P); // basis values
    int B = 0;
    d.basis_degree.clear();
    for (int m = 0; m <= degree; ++m) {
        const int lo = table.degree_offset[m], hi = table.degree_offset[m + 1];
        const int nc = hi - lo;
        Eigen::MatrixXd C = Eigen::MatrixXd::Zero(nc, M);
        for (int c = 0; c < nc; ++c) C(c, lo + c) = 1.0;
        Eigen::MatrixXd Cv = V.middleRows(lo, nc);
        for (int pass = 0; pass < 2; ++pass) {
            if (B == 0) break;
            const Eigen::MatrixXd proj =
                Cv * d.weights.asDiagonal() * Phi.topRows(B).transpose();  // nc x B
            Cv -= proj * Phi.topRows(B);
            C -= proj * T.topRows(B);
        }
        const Eigen::MatrixXd Gm = Cv * d.weights.asDiagonal() * Cv.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Gm);
        const double thresh = 1e-10 * std::max(1.0, es.eigenvalues().maxCoeff());
        for (int j = 0; j < nc; ++j) {
            if (es.eigenvalues()[j] <= thresh) {
                ++d.discarded_directions;
                continue;
            }
            const double inv = 1.0 / std::sqrt(es.eigenvalues()[j]);
            T.row(B) = inv * es.eigenvectors().col(j).transpose() * C;
            Phi.row(B) = inv * es.eigenvectors().col(j).transpose() * Cv;
            d.basis_degree.push_back(m);
            ++B;
        }
    }
    d.basis_size = B;
    d.basis_values = Phi.topRows(B);
    const Eigen::MatrixXd Tb = T.topRows(B);

    for (int i = 0; i < 3; ++i) {
        const Eigen::MatrixXd Ai = flow_derivation(table, left_mult_matrix(kFrameQuats[i]));
        const Eigen::MatrixXd Ari = flow_derivation(table, right_mult_matrix(kFrameQuats[i]));
        d.deriv[i] = Tb * G * Ai * Tb.transpose();
        d.deriv_right[i] = Tb * G * Ari * Tb.transpose();
    }
    return dom;
}

std::shared_ptr<const FrameDomain> build_torus_domain(const Eigen::Matrix3d& A, int N,
                                                      int degree) {
    if (N < 4 || N % 2 != 0) throw ConfigError("torus domain: N must be even and >= 4");
    const double det = A.determinant();
    if (std::abs(det) < 1e-12) throw ConfigError("torus domain: singular frame matrix");
    if (degree < 0) degree = std::min(3, torus_max_degree(N));
    if (degree > torus_max_degree(N))
        throw ConfigError("torus domain: degree exceeds grid resolution");

    auto dom = std::make_shared<FrameDomain>();
    FrameDomain& d = *dom;
    d.kind = DomainKind::Torus3;
    d.degree = degree;
    d.kappa = 1.0;
    d.frame = A;
    d.res_radial = N;
    {
        Eigen::JacobiSVD<Eigen::Matrix3d> svd(A);
        d.frame_cond = svd.singularValues()(0) / svd.singularValues()(2);
    }

    const int P = N * N * N;
    d.nodes.resize(P, 3);
    d.weights = Eigen::VectorXd::Constant(P, 1.0 / P);
    int p = 0;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c) {
                d.nodes.row(p) << double(a) / N, double(b) / N, double(c) / N;
                ++p;
            }
    d.volume = 1.0;

    // Canonical mode representatives ordered by grade |k|_inf, then lex.
    std::vector<Eigen::Vector3i> ks;
    for (int g = 1; g <= degree; ++g)
        for (int k1 = -g; k1 <= g; ++k1)
            for (int k2 = -g; k2 <= g; ++k2)
                for (int k3 = -g; k3 <= g; ++k3) {
                    const Eigen::Vector3i k(k1, k2, k3);
                    if (k.cwiseAbs().maxCoeff() != g) continue;
                    const bool canonical =
                        k1 > 0 || (k1 == 0 && k2 > 0) || (k1 == 0 && k2 == 0 && k3 > 0);
                    if (canonical) ks.push_back(k);
                }
    std::stable_sort(ks.begin(), ks.end(), [](const auto& a, const auto& b) {
        const int ga = a.cwiseAbs().maxCoeff(), gb = b.cwiseAbs().maxCoeff();
        if (ga != gb) return ga < gb;
        return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
    });

    const int B = 1 + 2 * static_cast<int>(ks.size());
    d.basis_size = B;
    d.basis_values.resize(B, P);
    d.basis_values.row(0).setOnes();
    d.basis_degree.assign(B, 0);
    d.modes.push_back({Eigen::Vector3i::Zero(), 0, -1});
    const double rt2 = std::numbers::sqrt2;
    int row = 1;
    for (const auto& k : ks) {
        for (int q = 0; q < P; ++q) {
            const double ph = 2.0 * kPi * (k.cast<double>().dot(d.nodes.row(q)));
            d.basis_values(row, q) = rt2 * std::cos(ph);
            d.basis_values(row + 1, q) = rt2 * std::sin(ph);
        }
        d.basis_degree[row] = d.basis_degree[row + 1] = k.cwiseAbs().maxCoeff();
        d.modes.push_back({k, row, row + 1});
        row += 2;
    }

    for (int i = 0; i < 3; ++i) {
        d.deriv[i] = Eigen::MatrixXd::Zero(B, B);
        for (const auto& mode : d.modes) {
            if (mode.sin_idx < 0) continue;
            const double om = 2.0 * kPi * A.row(i).dot(mode.k.cast<double>());
            d.deriv[i](mode.sin_idx, mode.cos_idx) = -om;
            d.deriv[i](mode.cos_idx, mode.sin_idx) = om;
        }
    }
    return dom;
}

double HypercontactReport::max_violation() const {
    return std::max({max_alpha_pairing, max_dalpha, max_bracket, max_mu, max_star,
                     quadrature_defect});
}

namespace {

// alpha_i at y applied to an ambient vector eta: Re(q_i y conj(eta)).
double alpha_form(int i, const Quat& y, const Eigen::Vector4d& eta) {
    return qdot(qmul(kFrameQuats[i], y), vec_to_quat(eta));
}

// d alpha_1 = 2(dy0^dy1 + dy2^dy3) and cyclic with index pattern (0i, jk).
double dalpha_form(int i, const Eigen::Vector4d& u, const Eigen::Vector4d& v) {
    static const int pat[3][4] = {{0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}};
    const int* q = pat[i];
    return 2.0 * ((u[q[0]] * v[q[1]] - u[q[1]] * v[q[0]]) +
                  (u[q[2]] * v[q[3]] - u[q[3]] * v[q[2]]));
}

}  // namespace

HypercontactReport verify_hypercontact(const FrameDomain& d) {
    HypercontactReport r;
    r.quadrature_defect = std::abs(d.weights.sum() - d.volume);
    if (d.kind == DomainKind::Torus3) {
        // Constant frame: epsilon_i = rows of A^{-T} dt are closed, brackets vanish.
        const Eigen::Matrix3d Ainv = d.frame.inverse();
        r.kappa = d.kappa;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double pairing = Ainv.col(i).dot(d.frame.row(j));
                r.max_alpha_pairing =
                    std::max(r.max_alpha_pairing, std::abs(pairing - (i == j ? 1.0 : 0.0)));
            }
        r.quadrature_defect = std::abs(d.weights.sum() - d.volume);
        return r;
    }

    // Closed-form bracket residual: [v_i, v_j] - 2 v_k as 4x4 matrices.
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        const Eigen::Matrix4d Qi = left_mult_matrix(kFrameQuats[i]);
        const Eigen::Matrix4d Qj = left_mult_matrix(kFrameQuats[j]);
        const Eigen::Matrix4d Qk = left_mult_matrix(kFrameQuats[k]);
        const Eigen::Matrix4d res = (Qi * Qj - Qj * Qi) - d.kappa * Qk;
        r.max_bracket = std::max(r.max_bracket, res.cwiseAbs().maxCoeff());
    }

    double kappa_min = 1e300, kappa_max = -1e300;
    for (int p = 0; p < d.num_nodes(); ++p) {
        const Quat y{d.nodes(p, 0), d.nodes(p, 1), d.nodes(p, 2), d.nodes(p, 3)};
        std::array<Eigen::Vector4d, 3> v;
        for (int i = 0; i < 3; ++i) v[i] = quat_to_vec(qmul(kFrameQuats[i], y));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double a = alpha_form(i, y, v[j]);
                r.max_alpha_pairing =
                    std::max(r.max_alpha_pairing, std::abs(a - (i == j ? 1.0 : 0.0)));
            }
        // mu = (alpha_2(v_3), alpha_3(v_1), alpha_1(v_2))
        r.max_mu = std::max({r.max_mu, std::abs(alpha_form(1, y, v[2])),
                             std::abs(alpha_form(2, y, v[0])), std::abs(alpha_form(0, y, v[1]))});
        for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3, k = (i + 2) % 3;
            const double da = dalpha_form(i, v[j], v[k]);
            kappa_min = std::min(kappa_min, da);
            kappa_max = std::max(kappa_max, da);
            r.max_dalpha = std::max(r.max_dalpha, std::abs(da - 2.0));
            // d alpha_i = kappa * alpha_i, i.e. d alpha_i = kappa alpha_j ^ alpha_k
            // on the orthonormal coframe; compare on all frame pairs.
            for (int a = 0; a < 3; ++a)
                for (int b = a + 1; b < 3; ++b) {
                    const double lhs = dalpha_form(i, v[a], v[b]);
                    const double star = (a == j && b == k)   ? 1.0
                                        : (a == k && b == j) ? -1.0
                                                             : 0.0;
                    r.max_star = std::max(r.max_star, std::abs(lhs - 2.0 * star));
                }
        }
    }
    r.kappa = 0.5 * (kappa_min + kappa_max);
    return r;
}

ImQuat hopf_map(const ImQuat& lambda, const Quat& y) {
    const Quat h = -(y.conj() * lambda.as_quat() * y);
    return {h.x, h.y, h.z};
}

ImQuat hopf_map_mirror(const ImQuat& lambda, const Quat& y) {
    const Quat h = -(y * lambda.as_quat() * y.conj());
    return {h.x, h.y, h.z};
}

}  // namespace hkfloer
