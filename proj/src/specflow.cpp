#include "hkfloer/specflow.hpp"

#include <algorithm>
#include <cmath>

namespace hkfloer {

namespace {

Eigen::VectorXd merged_eigenvalues(const std::vector<Eigen::MatrixXd>& blocks) {
    std::vector<double> all;
    for (const auto& b : blocks) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw NumericalError("spectral_flow: eigensolver failed");
        for (int i = 0; i < es.eigenvalues().size(); ++i) all.push_back(es.eigenvalues()[i]);
    }
    std::sort(all.begin(), all.end());
    return Eigen::Map<Eigen::VectorXd>(all.data(), static_cast<Eigen::Index>(all.size()));
}

int negative_count(const Eigen::VectorXd& ev) {
    int n = 0;
    for (int i = 0; i < ev.size(); ++i)
        if (ev[i] < 0.0) ++n;
    return n;
}

// A step is ambiguous when some eigenvalue keeps its sign but moved farther
// than its distance to zero, so a double crossing could hide inside.
bool step_ambiguous(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (int i = 0; i < a.size(); ++i) {
        const double m = std::abs(b[i] - a[i]);
        if (a[i] * b[i] > 0.0 && std::min(std::abs(a[i]), std::abs(b[i])) < m) return true;
    }
    return false;
}

}  // namespace

SpectralFlowResult spectral_flow(const OperatorFamily& fam, int initial_steps, int max_depth) {
    SpectralFlowResult out;
    std::map<double, Eigen::VectorXd> cache;
    auto eig_at = [&](double t) -> const Eigen::VectorXd& {
        auto it = cache.find(t);
        if (it == cache.end()) it = cache.emplace(t, merged_eigenvalues(fam.blocks_at(t))).first;
        return it->second;
    };

    const Eigen::VectorXd& e0 = eig_at(0.0);
    const Eigen::VectorXd& e1 = eig_at(1.0);
    const double m0 = e0.cwiseAbs().minCoeff(), m1 = e1.cwiseAbs().minCoeff();
    out.endpoint_min_abs = std::min(m0, m1);
    if (out.endpoint_min_abs < 1e-8)
        throw NumericalError("spectral_flow: degenerate endpoint operator (min |eigenvalue| " +
                             std::to_string(out.endpoint_min_abs) + ")");

    // Depth-first refinement over [0, 1].
    struct Interval {
        double a, b;
        int depth;
    };
    std::vector<Interval> stack;
    for (int i = initial_steps - 1; i >= 0; --i)
        stack.push_back({double(i) / initial_steps, double(i + 1) / initial_steps, 0});

    int flow = 0;
    while (!stack.empty()) {
        const Interval iv = stack.back();
        stack.pop_back();
        const Eigen::VectorXd& ea = eig_at(iv.a);
        const Eigen::VectorXd& eb = eig_at(iv.b);
        if (step_ambiguous(ea, eb)) {
            if (iv.depth >= max_depth)
                throw NumericalError("spectral_flow: ambiguous crossing after max refinement");
            const double mid = 0.5 * (iv.a + iv.b);
            stack.push_back({mid, iv.b, iv.depth + 1});
            stack.push_back({iv.a, mid, iv.depth + 1});
            continue;
        }
        flow += negative_count(ea) - negative_count(eb);
    }
    out.flow = flow;

    for (const auto& [t, ev] : cache) {
        out.t_samples.push_back(t);
        out.eigenvalues.push_back(ev);
    }
    return out;
}

OperatorFamily hessian_family_constant(std::shared_ptr<const FrameDomain> d,
                                       const Target& target, const Eigen::VectorXd& x,
                                       const HamiltonianSpec& H, double eps, int degree) {
    OperatorFamily fam;
    fam.eps = eps;
    const int n = target.n;
    const int m = 4 * n;
    if (d->kind == DomainKind::Torus3 && H.y_independent()) {
        // Per-mode blocks: a y-independent Hessian acts on the H^n factor and
        // does not mix Fourier modes.
        const Eigen::MatrixXd hess = H.hess(x);
        std::vector<Eigen::MatrixXd> base;
        for (const auto& mode : d->modes) {
            if (mode.k.cwiseAbs().maxCoeff() > degree) continue;
            base.push_back(mode_block(*d, mode.k, n).block);
        }
        int size = 0;
        for (const auto& b : base) size += static_cast<int>(b.rows());
        fam.size = size;
        fam.blocks_at = [base, hess, eps, m](double t) {
            std::vector<Eigen::MatrixXd> out;
            out.reserve(base.size());
            for (const auto& b : base) {
                Eigen::MatrixXd blk = b;
                const int copies = static_cast<int>(b.rows()) / m;
                for (int c = 0; c < copies; ++c)
                    blk.block(c * m, c * m, m, m) -= t * hess;
                blk += eps * (1.0 - t) * Eigen::MatrixXd::Identity(b.rows(), b.cols());
                out.push_back(std::move(blk));
            }
            return out;
        };
        return fam;
    }

    const Eigen::MatrixXd D = dirac_matrix(*d, n, degree);
    const FieldMap fx = constant_field(d, target, x);
    const Eigen::MatrixXd P = hessian_projection(*d, H, fx, degree);
    fam.size = static_cast<int>(D.rows());
    fam.blocks_at = [D, P, eps](double t) {
        std::vector<Eigen::MatrixXd> out;
        out.push_back(D - t * P +
                      eps * (1.0 - t) * Eigen::MatrixXd::Identity(D.rows(), D.cols()));
        return out;
    };
    return fam;
}

OperatorFamily hessian_family_linear(const FieldMap& f, const HamiltonianSpec& H, double eps,
                                     int degree) {
    OperatorFamily fam;
    fam.eps = eps;
    const Eigen::MatrixXd D = dirac_matrix(*f.domain, f.target.n, degree);
    fam.size = static_cast<int>(D.rows());
    const Eigen::VectorXd mean = mean_value(f);
    const FieldMap fbar = constant_field(f.domain, f.target, mean);
    fam.blocks_at = [D, f, fbar, H, eps, degree](double t) {
        const FieldMap ft = fbar + (f - fbar) * t;
        const Eigen::MatrixXd P = hessian_projection(*f.domain, H, ft, degree);
        std::vector<Eigen::MatrixXd> out;
        out.push_back(D - t * P +
                      eps * (1.0 - t) * Eigen::MatrixXd::Identity(D.rows(), D.cols()));
        return out;
    };
    return fam;
}

double default_epsilon(const FrameDomain& d, int degree, int n) {
    return 0.5 * dirac_gap(d, degree, n).min_positive;
}

FloerIndexResult floer_index(std::shared_ptr<const FrameDomain> d, const Target& target,
                             const Eigen::VectorXd& x, const HamiltonianSpec& H, int degree,
                             double eps) {
    if (degree < 1 || degree > d->degree)
        throw ConfigError("floer_index: degree out of range for the domain");
    FloerIndexResult r;
    {
        const Eigen::MatrixXd hess = H.hess(x);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().cwiseAbs().minCoeff() < 1e-10)
            throw NumericalError("floer_index: degenerate Hessian at the critical point");
    }
    r.eps = eps > 0.0 ? eps : default_epsilon(*d, degree, target.n);
    const OperatorFamily fam = hessian_family_constant(d, target, x, H, r.eps, degree);
    r.flow = spectral_flow(fam);
    r.mu = -r.flow.flow;
    if (degree >= 2) {
        const OperatorFamily coarse =
            hessian_family_constant(d, target, x, H, r.eps, degree - 1);
        r.mu_coarser = -spectral_flow(coarse).flow;
        if (r.mu_coarser != r.mu)
            throw NumericalError("floer_index: index not stable across truncation degrees");
    } else {
        r.mu_coarser = r.mu;
    }
    return r;
}

FloerIndexResult floer_index_field(const FieldMap& f, const HamiltonianSpec& H, int degree,
                                   double eps) {
    FloerIndexResult r;
    r.eps = eps > 0.0 ? eps : default_epsilon(*f.domain, degree, f.target.n);
    r.flow = spectral_flow(hessian_family_linear(f, H, r.eps, degree));
    r.mu = -r.flow.flow;
    if (degree >= 2) {
        r.mu_coarser = -spectral_flow(hessian_family_linear(f, H, r.eps, degree - 1)).flow;
        if (r.mu_coarser != r.mu)
            throw NumericalError("floer_index: index not stable across truncation degrees");
    } else {
        r.mu_coarser = r.mu;
    }
    return r;
}

int loop_flow_check(const OperatorFamily& loop) { return spectral_flow(loop).flow; }

}  // namespace hkfloer
