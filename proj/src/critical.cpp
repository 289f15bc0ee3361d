#include <algorithm>

#include "hkfloer/dynamics.hpp"

namespace hkfloer {

namespace {

// L2 distance between solutions, minimizing over lattice translations of the
// mean for torus targets.
double solution_distance(const FieldMap& a, const FieldMap& b) {
    if (!a.target.lattice) return (a - b).l2_norm();
    const double L = *a.target.lattice;
    Eigen::VectorXd shift = mean_value(a) - mean_value(b);
    for (int i = 0; i < shift.size(); ++i) shift[i] = std::round(shift[i] / L) * L;
    const FieldMap bs = b + constant_field(b.domain, b.target, shift);
    return (a - bs).l2_norm();
}

}  // namespace

std::vector<CriticalPoint> find_critical_points(const HamiltonianSpec& H,
                                                std::shared_ptr<const FrameDomain> d,
                                                const Target& target,
                                                const std::vector<FieldMap>& seeds,
                                                const NewtonOptions& opt) {
    const int n = target.n;
    const int B = d->basis_size_for_degree(opt.solve_degree);
    const int N = 4 * n * B;
    const Eigen::MatrixXd D = dirac_matrix(*d, n, opt.solve_degree);
    const double sqrt_kappa = std::sqrt(d->kappa);

    std::vector<CriticalPoint> found;
    for (const FieldMap& seed : seeds) {
        FieldMap f = synthesize(d, target, seed.coeffs.leftCols(B));
        bool converged = false;
        double res_norm = 0.0;
        double prev = std::numeric_limits<double>::infinity();
        int stalls = 0;
        for (int it = 0; it < opt.max_iter; ++it) {
            // residual r = D f - P grad H(f) in coefficient space
            Eigen::MatrixXd gv(4 * n, d->num_nodes());
            for (int p = 0; p < d->num_nodes(); ++p)
                gv.col(p) = H.grad(f.values.col(p), d.get(), p);
            const Eigen::MatrixXd gc =
                gv * d->weights.asDiagonal() * d->basis_values.transpose();
            const Eigen::Map<const Eigen::VectorXd> fvec(f.coeffs.data(), N);
            Eigen::VectorXd rvec = D * fvec;
            Eigen::MatrixXd rc =
                Eigen::Map<Eigen::MatrixXd>(rvec.data(), 4 * n, B) - gc.leftCols(B);
            res_norm = sqrt_kappa * rc.norm();
            if (res_norm <= opt.tol) {
                converged = true;
                break;
            }
            if (res_norm > 0.99 * prev && ++stalls > 4) break;
            prev = std::min(prev, res_norm);
            const Eigen::MatrixXd J = D - hessian_projection(*d, H, f, opt.solve_degree);
            const Eigen::VectorXd step =
                J.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(rc.data(), N));
            Eigen::MatrixXd c = f.coeffs.leftCols(B);
            Eigen::Map<Eigen::VectorXd>(c.data(), N) -= step;
            f = synthesize(d, target, c);
        }
        if (!converged) continue;  // divergent seed, discarded

        bool duplicate = false;
        for (const auto& g : found)
            if (solution_distance(g.f, f) < opt.dedup_tol) {
                duplicate = true;
                break;
            }
        if (duplicate) continue;

        CriticalPoint cp;
        cp.f = f;
        cp.residual = res_norm;
        cp.action_value = perturbed_action(f, H);

        const int rep_degree = std::min(opt.report_degree, d->degree);
        const Eigen::VectorXd x = mean_value(f);
        const bool constant_like =
            (f - constant_field(d, target, x)).l2_norm() < 1e-8 && H.y_independent();
        if (constant_like) {
            const auto fam = hessian_family_constant(d, target, x, H, 0.0, rep_degree);
            double mn = std::numeric_limits<double>::infinity();
            for (const auto& blk : fam.blocks_at(1.0)) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blk, Eigen::EigenvaluesOnly);
                mn = std::min(mn, es.eigenvalues().cwiseAbs().minCoeff());
            }
            cp.hessian_min_abs = mn;
        } else {
            const Eigen::MatrixXd A =
                dirac_matrix(*d, n, rep_degree) - hessian_projection(*d, H, f, rep_degree);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
            cp.hessian_min_abs = es.eigenvalues().cwiseAbs().minCoeff();
        }
        cp.nondegenerate = cp.hessian_min_abs > 1e-6;
        if (opt.compute_mu) {
            if (constant_like)
                cp.mu = floer_index(d, target, x, H, rep_degree).mu;
            else
                cp.mu = floer_index_field(f, H, rep_degree).mu;
        }
        found.push_back(std::move(cp));
    }

    std::stable_sort(found.begin(), found.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.mu != b.mu) return a.mu > b.mu;
        return a.action_value < b.action_value;
    });
    return found;
}

std::vector<FieldMap> critical_seeds(const HamiltonianSpec& H,
                                     std::shared_ptr<const FrameDomain> d,
                                     const Target& target, int per_axis) {
    std::vector<FieldMap> seeds;
    const int m = 4 * target.n;
    if (H.separable()) {
        std::vector<std::vector<double>> axis_points(m);
        for (int mu = 0; mu < m; ++mu) {
            const CircleFactor h = circle_factor(H, mu);
            if (h.terms.empty()) {
                axis_points[mu] = {0.0};
                continue;
            }
            for (const auto& c : circle_critical_points(h)) axis_points[mu].push_back(c.x);
        }
        std::vector<int> idx(m, 0);
        while (true) {
            Eigen::VectorXd x(m);
            for (int mu = 0; mu < m; ++mu) x[mu] = axis_points[mu][idx[mu]];
            seeds.push_back(constant_field(d, target, x));
            int mu = 0;
            while (mu < m && ++idx[mu] == static_cast<int>(axis_points[mu].size())) {
                idx[mu] = 0;
                ++mu;
            }
            if (mu == m) break;
        }
        return seeds;
    }
    const double L = target.lattice.value_or(1.0);
    std::vector<int> idx(m, 0);
    while (true) {
        Eigen::VectorXd x(m);
        for (int mu = 0; mu < m; ++mu) x[mu] = L * idx[mu] / per_axis;
        seeds.push_back(constant_field(d, target, x));
        int mu = 0;
        while (mu < m && ++idx[mu] == per_axis) {
            idx[mu] = 0;
            ++mu;
        }
        if (mu == m) break;
    }
    return seeds;
}

int morse_index(const HamiltonianSpec& H, const Eigen::VectorXd& x) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.hess(x), Eigen::EigenvaluesOnly);
    int neg = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i] < 0) ++neg;
    return neg;
}

}  // namespace hkfloer
