#include "hkfloer/hamiltonian.hpp"

#include <cmath>
#include <numbers>

namespace hkfloer {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

bool HamiltonianSpec::y_independent() const {
    for (const auto& t : terms)
        if (t.domain_basis >= 0) return false;
    return true;
}

bool HamiltonianSpec::separable() const {
    for (const auto& t : terms) {
        if (t.domain_basis >= 0) return false;
        int nz = 0;
        for (int i = 0; i < t.target_freq.size(); ++i)
            if (t.target_freq[i] != 0) ++nz;
        if (nz > 1) return false;
    }
    return true;
}

double HamiltonianSpec::domain_factor(const HamTerm& t, const FrameDomain* d, int node) const {
    if (t.domain_basis < 0) return 1.0;
    if (!d || node < 0)
        throw ConfigError("Hamiltonian with domain factor evaluated without a node");
    return d->basis_values(t.domain_basis, node);
}

double HamiltonianSpec::eval(const Eigen::VectorXd& x, const FrameDomain* d, int node) const {
    double s = 0.0;
    for (const auto& t : terms) {
        const double ph = kTwoPi * t.target_freq.cast<double>().dot(x) / lattice + t.phase;
        s += t.amplitude * std::cos(ph) * domain_factor(t, d, node);
    }
    return s;
}

Eigen::VectorXd HamiltonianSpec::grad(const Eigen::VectorXd& x, const FrameDomain* d,
                                      int node) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim());
    for (const auto& t : terms) {
        const double ph = kTwoPi * t.target_freq.cast<double>().dot(x) / lattice + t.phase;
        const double c = -t.amplitude * std::sin(ph) * (kTwoPi / lattice) *
                         domain_factor(t, d, node);
        g += c * t.target_freq.cast<double>();
    }
    return g;
}

Eigen::MatrixXd HamiltonianSpec::hess(const Eigen::VectorXd& x, const FrameDomain* d,
                                      int node) const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim(), dim());
    for (const auto& t : terms) {
        const double ph = kTwoPi * t.target_freq.cast<double>().dot(x) / lattice + t.phase;
        const double c = -t.amplitude * std::cos(ph) * (kTwoPi / lattice) *
                         (kTwoPi / lattice) * domain_factor(t, d, node);
        const Eigen::VectorXd m = t.target_freq.cast<double>();
        h += c * m * m.transpose();
    }
    return h;
}

double HamiltonianSpec::c_norm(int l, const FrameDomain* d) const {
    double best = 0.0;
    for (int j = 0; j <= l; ++j) {
        double s = 0.0;
        for (const auto& t : terms) {
            double fac = 1.0;
            if (t.domain_basis >= 0) {
                if (!d) throw ConfigError("c_norm of y-dependent Hamiltonian needs a domain");
                fac = d->basis_values.row(t.domain_basis).cwiseAbs().maxCoeff();
            }
            const double mnorm = t.target_freq.cast<double>().norm() * kTwoPi / lattice;
            s += std::abs(t.amplitude) * std::pow(mnorm, j) * fac;
        }
        best = std::max(best, s);
    }
    return best;
}

double HamiltonianSpec::range(const FrameDomain* d) const {
    if (separable()) {
        double r = 0.0;
        for (const auto& t : terms) r += 2.0 * std::abs(t.amplitude);
        return r;
    }
    return 2.0 * c_norm(0, d);
}

double HamiltonianSpec::sup_grad(const FrameDomain* d) const {
    double s = 0.0;
    for (const auto& t : terms) {
        double fac = 1.0;
        if (t.domain_basis >= 0) {
            if (!d) throw ConfigError("sup_grad of y-dependent Hamiltonian needs a domain");
            fac = d->basis_values.row(t.domain_basis).cwiseAbs().maxCoeff();
        }
        s += std::abs(t.amplitude) * t.target_freq.cast<double>().norm() * kTwoPi / lattice *
             fac;
    }
    return s;
}

HamiltonianSpec separable_cos(int n, const Eigen::VectorXd& amplitudes,
                              const Eigen::VectorXd& shifts, double lattice) {
    HamiltonianSpec h;
    h.n = n;
    h.lattice = lattice;
    for (int mu = 0; mu < 4 * n; ++mu) {
        HamTerm t;
        t.amplitude = amplitudes[mu];
        t.target_freq = Eigen::VectorXi::Zero(4 * n);
        t.target_freq[mu] = 1;
        t.phase = -kTwoPi * shifts[mu] / lattice;
        h.terms.push_back(t);
    }
    return h;
}

HamiltonianSpec separable_mixed(int n, const Eigen::VectorXd& amplitudes,
                                const Eigen::VectorXd& shifts,
                                const std::vector<int>& double_freq, double lattice) {
    HamiltonianSpec h = separable_cos(n, amplitudes, shifts, lattice);
    for (int mu : double_freq) {
        h.terms[mu].target_freq[mu] = 2;
        h.terms[mu].phase *= 2.0;
    }
    return h;
}

double CircleFactor::eval(double x) const {
    double s = 0.0;
    for (const auto& t : terms)
        s += t.amplitude * std::cos(kTwoPi * t.target_freq[0] * x / lattice + t.phase);
    return s;
}

double CircleFactor::deriv(double x) const {
    double s = 0.0;
    for (const auto& t : terms) {
        const double om = kTwoPi * t.target_freq[0] / lattice;
        s += -t.amplitude * om * std::sin(om * x + t.phase);
    }
    return s;
}

double CircleFactor::deriv2(double x) const {
    double s = 0.0;
    for (const auto& t : terms) {
        const double om = kTwoPi * t.target_freq[0] / lattice;
        s += -t.amplitude * om * om * std::cos(om * x + t.phase);
    }
    return s;
}

CircleFactor circle_factor(const HamiltonianSpec& h, int mu) {
    if (!h.separable()) throw ConfigError("circle_factor: Hamiltonian is not separable");
    CircleFactor f;
    f.lattice = h.lattice;
    for (const auto& t : h.terms) {
        if (t.target_freq[mu] == 0) continue;
        HamTerm s = t;
        s.target_freq = Eigen::VectorXi::Constant(1, t.target_freq[mu]);
        f.terms.push_back(s);
    }
    return f;
}

}  // namespace hkfloer
