#include "hkfloer/action.hpp"

namespace hkfloer {

void require_lift(const FieldMap& f) {
    if (f.target.lattice && !f.contractible)
        throw NumericalError("action: non-contractible torus-target map has no lift");
}

double action(const FieldMap& f) {
    require_lift(f);
    const FieldMap df = dirac_apply(f);
    double s = 0.0;
    for (int c = 0; c < f.coeffs.cols(); ++c) s += f.coeffs.col(c).dot(df.coeffs.col(c));
    return 0.5 * f.domain->kappa * s;
}

double hamiltonian_integral(const FieldMap& f, const HamiltonianSpec& H) {
    double s = 0.0;
    for (int p = 0; p < f.domain->num_nodes(); ++p)
        s += f.domain->weights[p] * H.eval(f.values.col(p), f.domain.get(), p);
    return f.domain->kappa * s;
}

double perturbed_action(const FieldMap& f, const HamiltonianSpec& H) {
    return action(f) - hamiltonian_integral(f, H);
}

double energy(const FieldMap& f) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        s += (f.coeffs * f.domain->deriv[i].transpose()).squaredNorm();
    return 0.5 * s;
}

FieldMap action_gradient(const FieldMap& f, const HamiltonianSpec* H) {
    FieldMap g = dirac_apply(f);
    if (H) {
        Eigen::MatrixXd v = g.values;
        for (int p = 0; p < f.domain->num_nodes(); ++p)
            v.col(p) -= H->grad(f.values.col(p), f.domain.get(), p);
        return field_from_values(f.domain, f.target, v);
    }
    return g;
}

double energy_identity_residual(const FieldMap& f) {
    if (f.domain->kind != DomainKind::Sphere3)
        throw ConfigError("energy identity: Cartan sphere domain required");
    const FieldMap df = dirac_apply(f);
    const double quad = 0.5 * df.coeffs.squaredNorm();  // (1/2) int |Df|^2, no kappa
    return std::abs(energy(f) - action(f) - quad);
}

AprioriReport apriori_bound_check(const FieldMap& f, double c0) {
    AprioriReport r;
    r.action_value = action(f);
    r.dirac_sq = dirac_apply(f).coeffs.squaredNorm();
    r.c = 1.0 + f.domain->kappa * f.domain->kappa * c0;
    r.margin = r.c * r.dirac_sq - r.action_value;
    r.holds = r.margin >= -1e-10 * std::max(1.0, std::abs(r.action_value));
    return r;
}

}  // namespace hkfloer
