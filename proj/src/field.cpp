#include "hkfloer/field.hpp"

#include <functional>
#include <random>

namespace hkfloer {

double uniform01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double FieldMap::l2_norm_quadrature() const {
    double s = 0.0;
    for (int p = 0; p < domain->num_nodes(); ++p)
        s += domain->weights[p] * values.col(p).squaredNorm();
    return std::sqrt(s);
}

double inner_kappa(const FieldMap& a, const FieldMap& b) {
    double s = 0.0;
    for (int p = 0; p < a.domain->num_nodes(); ++p)
        s += a.domain->weights[p] * a.values.col(p).dot(b.values.col(p));
    return a.domain->kappa * s;
}

FieldMap FieldMap::operator+(const FieldMap& o) const {
    FieldMap r = *this;
    r.values += o.values;
    r.coeffs += o.coeffs;
    r.truncation_warning = truncation_warning || o.truncation_warning;
    return r;
}

FieldMap FieldMap::operator-(const FieldMap& o) const {
    FieldMap r = *this;
    r.values -= o.values;
    r.coeffs -= o.coeffs;
    r.truncation_warning = truncation_warning || o.truncation_warning;
    return r;
}

FieldMap FieldMap::operator*(double s) const {
    FieldMap r = *this;
    r.values *= s;
    r.coeffs *= s;
    return r;
}

FieldMap synthesize(std::shared_ptr<const FrameDomain> domain, const Target& target,
                    const Eigen::MatrixXd& coeffs) {
    if (coeffs.rows() != target.real_dim() || coeffs.cols() > domain->basis_size)
        throw ConfigError("synthesize: coefficient block out of range");
    FieldMap f;
    f.domain = std::move(domain);
    f.target = target;
    f.coeffs = Eigen::MatrixXd::Zero(target.real_dim(), f.domain->basis_size);
    f.coeffs.leftCols(coeffs.cols()) = coeffs;
    f.values = f.coeffs * f.domain->basis_values;
    f.winding = Eigen::VectorXi::Zero(target.real_dim());
    return f;
}

Eigen::MatrixXd analyze(const FieldMap& f) {
    return f.values * f.domain->weights.asDiagonal() * f.domain->basis_values.transpose();
}

FieldMap field_from_values(std::shared_ptr<const FrameDomain> domain, const Target& target,
                           const Eigen::MatrixXd& values, double tol) {
    FieldMap f;
    f.domain = std::move(domain);
    f.target = target;
    f.values = values;
    f.coeffs = values * f.domain->weights.asDiagonal() * f.domain->basis_values.transpose();
    f.winding = Eigen::VectorXi::Zero(target.real_dim());
    const Eigen::MatrixXd back = f.coeffs * f.domain->basis_values;
    const double defect = (back - values).norm();
    if (defect > tol * std::max(1.0, values.norm())) f.truncation_warning = true;
    return f;
}

FieldMap zero_field(std::shared_ptr<const FrameDomain> domain, const Target& target) {
    return synthesize(std::move(domain), target,
                      Eigen::MatrixXd::Zero(target.real_dim(), 1));
}

FieldMap constant_field(std::shared_ptr<const FrameDomain> domain, const Target& target,
                        const Eigen::VectorXd& x) {
    FieldMap f;
    f.domain = std::move(domain);
    f.target = target;
    f.values = x.replicate(1, f.domain->num_nodes());
    f.coeffs = f.values * f.domain->weights.asDiagonal() * f.domain->basis_values.transpose();
    f.winding = Eigen::VectorXi::Zero(target.real_dim());
    return f;
}

Eigen::VectorXd mean_value(const FieldMap& f) {
    if (f.target.lattice && !f.contractible)
        throw NumericalError("mean_value: torus-target map without a global lift");
    return (f.values * f.domain->weights) / f.domain->volume;
}

FieldMap random_bandlimited(std::shared_ptr<const FrameDomain> domain, const Target& target,
                            int degree, double amplitude, std::uint64_t seed) {
    if (degree > domain->degree)
        throw ConfigError("random_bandlimited: degree exceeds domain band limit");
    const int B = domain->basis_size_for_degree(degree);
    std::mt19937_64 gen(seed);
    Eigen::MatrixXd c(target.real_dim(), B);
    for (int r = 0; r < c.rows(); ++r)
        for (int b = 0; b < B; ++b)
            c(r, b) = amplitude * (2.0 * uniform01(gen()) - 1.0);
    return synthesize(std::move(domain), target, c);
}

FieldMap reeb_derivative(const FieldMap& f, int axis) {
    FieldMap g = f;
    g.coeffs = f.coeffs * f.domain->deriv[axis].transpose();
    g.values = g.coeffs * f.domain->basis_values;
    return g;
}

namespace {

FieldMap sphere_field_from(std::shared_ptr<const FrameDomain> domain,
                           const std::function<Quat(const Quat&)>& fn) {
    if (domain->kind != DomainKind::Sphere3)
        throw ConfigError("sphere field constructor requires a sphere domain");
    Eigen::MatrixXd v(4, domain->num_nodes());
    for (int p = 0; p < domain->num_nodes(); ++p) {
        const Quat y{domain->nodes(p, 0), domain->nodes(p, 1), domain->nodes(p, 2),
                     domain->nodes(p, 3)};
        v.col(p) = quat_to_vec(fn(y));
    }
    return field_from_values(std::move(domain), Target{1, std::nullopt}, v);
}

}  // namespace

FieldMap sphere_identity_field(std::shared_ptr<const FrameDomain> domain) {
    return sphere_field_from(std::move(domain), [](const Quat& y) { return y; });
}

FieldMap sphere_y_plus_2ybar_field(std::shared_ptr<const FrameDomain> domain) {
    return sphere_field_from(std::move(domain),
                             [](const Quat& y) { return y + y.conj() * 2.0; });
}

FieldMap hopf_eigenfield(std::shared_ptr<const FrameDomain> domain, const ImQuat& lambda) {
    return sphere_field_from(std::move(domain), [&](const Quat& y) {
        return hopf_map_mirror(lambda, y).as_quat();
    });
}

FieldMap hopf_field(std::shared_ptr<const FrameDomain> domain, const ImQuat& lambda) {
    return sphere_field_from(std::move(domain),
                             [&](const Quat& y) { return hopf_map(lambda, y).as_quat(); });
}

}  // namespace hkfloer
