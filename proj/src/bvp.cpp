#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>

#include "hkfloer/dynamics.hpp"

namespace hkfloer {

namespace {

// 4-stage Lobatto IIIA (order 6).  Stages 1 and 4 coincide with the interval
// endpoints; the quadratic 1 - (5/12) z + (7/120) z^2 has no real roots, so
// the condensed stage system is invertible for every symmetric Jacobian.
const double kSqrt5 = std::sqrt(5.0);
const double kC[4] = {0.0, (5.0 - kSqrt5) / 10.0, (5.0 + kSqrt5) / 10.0, 1.0};
const double kA2[4] = {(11.0 + kSqrt5) / 120.0, (25.0 - kSqrt5) / 120.0,
                       (25.0 - 13.0 * kSqrt5) / 120.0, (-1.0 + kSqrt5) / 120.0};
const double kA3[4] = {(11.0 - kSqrt5) / 120.0, (25.0 + 13.0 * kSqrt5) / 120.0,
                       (25.0 + kSqrt5) / 120.0, (-1.0 - kSqrt5) / 120.0};
const double kB[4] = {1.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 1.0 / 12.0};

// Right-hand side and Jacobian of du/ds = F(u) = -(eps^{-1} D u - P grad H(u))
// on the truncated coefficient space.
class FlowModel {
  public:
    FlowModel(std::shared_ptr<const FrameDomain> d, const Target& target,
              const HamiltonianSpec& H, double eps, int degree)
        : d_(std::move(d)), target_(target), H_(&H), eps_(eps) {
        B_ = d_->basis_size_for_degree(degree);
        N_ = 4 * target.n * B_;
        M_ = dirac_matrix(*d_, target.n, degree) / eps_;
        degree_ = degree;
    }

    int size() const { return N_; }
    int block() const { return B_; }
    const FrameDomain* domain() const { return d_.get(); }
    std::shared_ptr<const FrameDomain> domain_ptr() const { return d_; }
    const Target& target() const { return target_; }

    Eigen::MatrixXd values_of(const Eigen::VectorXd& c) const {
        const Eigen::Map<const Eigen::MatrixXd> cm(c.data(), 4 * target_.n, B_);
        return cm * d_->basis_values.topRows(B_);
    }

    Eigen::VectorXd grad_coeffs(const Eigen::VectorXd& c) const {
        const Eigen::MatrixXd v = values_of(c);
        Eigen::MatrixXd g(4 * target_.n, d_->num_nodes());
        for (int p = 0; p < d_->num_nodes(); ++p)
            g.col(p) = H_->grad(v.col(p), d_.get(), p);
        const Eigen::MatrixXd gc =
            g * d_->weights.asDiagonal() * d_->basis_values.topRows(B_).transpose();
        return Eigen::Map<const Eigen::VectorXd>(gc.data(), N_);
    }

    Eigen::VectorXd F(const Eigen::VectorXd& c) const { return -(M_ * c) + grad_coeffs(c); }

    // dF = -eps^{-1} D + projection of the Hessian at c.
    Eigen::MatrixXd dF(const Eigen::VectorXd& c) const {
        FieldMap f;
        f.domain = d_;
        f.target = target_;
        f.coeffs = Eigen::Map<const Eigen::MatrixXd>(c.data(), 4 * target_.n, B_);
        f.values = values_of(c);
        return -M_ + hessian_projection(*d_, *H_, f, degree_);
    }

    FieldMap to_field(const Eigen::VectorXd& c) const {
        return synthesize(d_, target_,
                          Eigen::Map<const Eigen::MatrixXd>(c.data(), 4 * target_.n, B_));
    }

    Eigen::VectorXd from_field(const FieldMap& f) const {
        const Eigen::MatrixXd c = f.coeffs.leftCols(B_);
        return Eigen::Map<const Eigen::VectorXd>(c.data(), N_);
    }

  private:
    std::shared_ptr<const FrameDomain> d_;
    Target target_;
    const HamiltonianSpec* H_;
    double eps_;
    int B_ = 0, N_ = 0, degree_ = 1;
    Eigen::MatrixXd M_;
};

struct StagePair {
    Eigen::VectorXd Y2, Y3;
};

// Solve the condensed stage equations for one interval by inner Newton.
void solve_stages(const FlowModel& model, double h, const Eigen::VectorXd& yl,
                  const Eigen::VectorXd& yr, const Eigen::VectorXd& f1,
                  const Eigen::VectorXd& f4, StagePair& st) {
    const int N = model.size();
    if (st.Y2.size() != N) {
        st.Y2 = yl + kC[1] * (yr - yl);
        st.Y3 = yl + kC[2] * (yr - yl);
    }
    for (int it = 0; it < 12; ++it) {
        const Eigen::VectorXd f2 = model.F(st.Y2), f3 = model.F(st.Y3);
        Eigen::VectorXd r2 = st.Y2 - yl - h * (kA2[0] * f1 + kA2[1] * f2 + kA2[2] * f3 + kA2[3] * f4);
        Eigen::VectorXd r3 = st.Y3 - yl - h * (kA3[0] * f1 + kA3[1] * f2 + kA3[2] * f3 + kA3[3] * f4);
        const double rn = std::sqrt(r2.squaredNorm() + r3.squaredNorm());
        if (rn < 1e-13 * std::max(1.0, yl.norm())) return;
        const Eigen::MatrixXd A2 = model.dF(st.Y2), A3 = model.dF(st.Y3);
        Eigen::MatrixXd J(2 * N, 2 * N);
        J.topLeftCorner(N, N) = Eigen::MatrixXd::Identity(N, N) - h * kA2[1] * A2;
        J.topRightCorner(N, N) = -h * kA2[2] * A3;
        J.bottomLeftCorner(N, N) = -h * kA3[1] * A2;
        J.bottomRightCorner(N, N) = Eigen::MatrixXd::Identity(N, N) - h * kA3[2] * A3;
        Eigen::VectorXd rhs(2 * N);
        rhs << r2, r3;
        const Eigen::VectorXd delta = J.partialPivLu().solve(rhs);
        st.Y2 -= delta.head(N);
        st.Y3 -= delta.tail(N);
    }
}

// Continuity residual and its endpoint Jacobians for one interval.
void interval_residual(const FlowModel& model, double h, const Eigen::VectorXd& yl,
                       const Eigen::VectorXd& yr, StagePair& st, Eigen::VectorXd& R,
                       Eigen::MatrixXd* dRl, Eigen::MatrixXd* dRr) {
    const int N = model.size();
    const Eigen::VectorXd f1 = model.F(yl), f4 = model.F(yr);
    solve_stages(model, h, yl, yr, f1, f4, st);
    const Eigen::VectorXd f2 = model.F(st.Y2), f3 = model.F(st.Y3);
    R = yr - yl - h * (kB[0] * f1 + kB[1] * f2 + kB[2] * f3 + kB[3] * f4);
    if (!dRl) return;

    const Eigen::MatrixXd A1 = model.dF(yl), A4 = model.dF(yr);
    const Eigen::MatrixXd A2 = model.dF(st.Y2), A3 = model.dF(st.Y3);
    Eigen::MatrixXd J(2 * N, 2 * N);
    J.topLeftCorner(N, N) = Eigen::MatrixXd::Identity(N, N) - h * kA2[1] * A2;
    J.topRightCorner(N, N) = -h * kA2[2] * A3;
    J.bottomLeftCorner(N, N) = -h * kA3[1] * A2;
    J.bottomRightCorner(N, N) = Eigen::MatrixXd::Identity(N, N) - h * kA3[2] * A3;
    Eigen::MatrixXd rhs(2 * N, 2 * N);
    rhs.topLeftCorner(N, N) = Eigen::MatrixXd::Identity(N, N) + h * kA2[0] * A1;
    rhs.bottomLeftCorner(N, N) = Eigen::MatrixXd::Identity(N, N) + h * kA3[0] * A1;
    rhs.topRightCorner(N, N) = h * kA2[3] * A4;
    rhs.bottomRightCorner(N, N) = h * kA3[3] * A4;
    const Eigen::MatrixXd S = J.partialPivLu().solve(rhs);  // stage sensitivities
    const auto dY2l = S.topLeftCorner(N, N), dY3l = S.bottomLeftCorner(N, N);
    const auto dY2r = S.topRightCorner(N, N), dY3r = S.bottomRightCorner(N, N);
    *dRl = -Eigen::MatrixXd::Identity(N, N) - h * (kB[0] * A1 + kB[1] * A2 * dY2l + kB[2] * A3 * dY3l);
    *dRr = Eigen::MatrixXd::Identity(N, N) - h * (kB[3] * A4 + kB[1] * A2 * dY2r + kB[2] * A3 * dY3r);
}

struct BoundaryData {
    Eigen::MatrixXd rows_left;   // V^T for eigenvalues <= 0 of dF at f-
    Eigen::MatrixXd rows_right;  // V^T for eigenvalues >= 0 of dF at f+
    double rho_left = 0.0, rho_right = 0.0;
};

BoundaryData boundary_data(const FlowModel& model, const Eigen::VectorXd& cl,
                           const Eigen::VectorXd& cr) {
    BoundaryData bd;
    const Eigen::MatrixXd Al = model.dF(cl), Ar = model.dF(cr);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> el(Al), er(Ar);
    bd.rho_left = el.eigenvalues().cwiseAbs().minCoeff();
    bd.rho_right = er.eigenvalues().cwiseAbs().minCoeff();
    if (std::min(bd.rho_left, bd.rho_right) < 1e-8)
        throw NumericalError("connect_orbit_bvp: degenerate endpoint Hessian");
    int nl = 0, nr = 0;
    for (int i = 0; i < el.eigenvalues().size(); ++i)
        if (el.eigenvalues()[i] <= 0) ++nl;
    for (int i = 0; i < er.eigenvalues().size(); ++i)
        if (er.eigenvalues()[i] >= 0) ++nr;
    const int N = model.size();
    bd.rows_left.resize(nl, N);
    bd.rows_right.resize(nr, N);
    int r = 0;
    for (int i = 0; i < N; ++i)
        if (el.eigenvalues()[i] <= 0) bd.rows_left.row(r++) = el.eigenvectors().col(i).transpose();
    r = 0;
    for (int i = 0; i < N; ++i)
        if (er.eigenvalues()[i] >= 0) bd.rows_right.row(r++) = er.eigenvectors().col(i).transpose();
    return bd;
}

}  // namespace

double perturbed_action_eps(const FieldMap& f, const HamiltonianSpec& H, double eps) {
    return action(f) / eps - hamiltonian_integral(f, H);
}

std::vector<FieldMap> morse_initial_guess(const CriticalPoint& left, const CriticalPoint& right,
                                          const HamiltonianSpec& H,
                                          const Eigen::VectorXd& s_grid) {
    if (!H.separable())
        throw ConfigError("morse_initial_guess: separable Hamiltonian required; supply a guess");
    const Eigen::VectorXd xm = mean_value(left.f), xp = mean_value(right.f);
    const double L = H.lattice;
    int moving = -1;
    for (int mu = 0; mu < xm.size(); ++mu) {
        double dmu = std::abs(xm[mu] - xp[mu]);
        dmu = std::min(dmu, L - dmu);
        if (dmu > 1e-8) {
            if (moving >= 0)
                throw ConfigError("morse_initial_guess: more than one moving coordinate");
            moving = mu;
        }
    }
    if (moving < 0) throw ConfigError("morse_initial_guess: endpoints coincide");

    const CircleFactor h = circle_factor(H, moving);
    const auto crit = circle_critical_points(h);
    // pick the arc from x- to x+ in the +x direction if it is free of interior
    // critical points, otherwise go the other way
    const double a = xm[moving];
    double b = xp[moving];
    while (b < a) b += L;
    bool plus_arc = true;
    for (const auto& c : crit) {
        for (double rep = c.x; rep < b + L; rep += L) {
            if (rep > a + 1e-9 && rep < b - 1e-9) plus_arc = false;
        }
        if (!plus_arc) break;
    }
    double target_lift = b;
    if (!plus_arc) {
        b = xp[moving];
        while (b > a) b -= L;
        target_lift = b;
    }
    const double mid = 0.5 * (a + target_lift);

    // integrate dx/ds = h'(x) from the arc midpoint both ways (RK4)
    const int m = static_cast<int>(s_grid.size());
    Eigen::VectorXd path(m);
    auto rk4 = [&](double x, double dt) {
        const double k1 = h.deriv(x);
        const double k2 = h.deriv(x + 0.5 * dt * k1);
        const double k3 = h.deriv(x + 0.5 * dt * k2);
        const double k4 = h.deriv(x + dt * k3);
        return x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    };
    int mid_idx = 0;
    for (int i = 1; i < m; ++i)
        if (std::abs(s_grid[i]) < std::abs(s_grid[mid_idx])) mid_idx = i;
    path[mid_idx] = mid;
    const int sub = 8;
    for (int i = mid_idx + 1; i < m; ++i) {
        double x = path[i - 1];
        const double dt = (s_grid[i] - s_grid[i - 1]) / sub;
        for (int k = 0; k < sub; ++k) x = rk4(x, dt);
        path[i] = x;
    }
    for (int i = mid_idx - 1; i >= 0; --i) {
        double x = path[i + 1];
        const double dt = (s_grid[i] - s_grid[i + 1]) / sub;
        for (int k = 0; k < sub; ++k) x = rk4(x, dt);
        path[i] = x;
    }

    std::vector<FieldMap> guess;
    guess.reserve(m);
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXd x = xm;
        x[moving] = path[i];
        guess.push_back(constant_field(left.f.domain, left.f.target, x));
    }
    return guess;
}

TrajectorySolution connect_orbit_bvp(const CriticalPoint& left, const CriticalPoint& right,
                                     const HamiltonianSpec& H, double eps,
                                     const BvpOptions& opt,
                                     const std::vector<FieldMap>* initial_guess) {
    auto d = left.f.domain;
    const Target target = left.f.target;
    if (right.f.domain.get() != d.get())
        throw ConfigError("connect_orbit_bvp: endpoints on different domains");

    TrajectorySolution sol;
    sol.epsilon = eps;
    sol.left = left;
    sol.right = right;

    // trivial constant trajectory
    if ((left.f - right.f).l2_norm() < 1e-12) {
        double S = opt.half_length > 0 ? opt.half_length : 1.0;
        const int m = std::max(2, int(2 * S * opt.slices_per_unit));
        sol.s_grid = Eigen::VectorXd::LinSpaced(m + 1, -S, S);
        for (int i = 0; i <= m; ++i) sol.slices.push_back(left.f);
        sol.action_values.assign(m + 1, perturbed_action_eps(left.f, H, eps));
        // du/ds = 0, so the defect is |eps^{-1} D f - grad H(f)|
        const FieldMap grad = action_gradient(left.f, &H);  // D f - grad H(f)
        const FieldMap df = dirac_apply(left.f);
        sol.residual =
            std::sqrt(d->kappa) * (df * (1.0 / eps) - (df - grad)).l2_norm();
        return sol;
    }

    const int degree = d->degree;
    FlowModel model(d, target, H, eps, degree);
    const int N = model.size();

    // endpoint data and half-length from the slow Hessian gaps
    Eigen::VectorXd cl = model.from_field(left.f);
    Eigen::VectorXd cr = model.from_field(right.f);
    BoundaryData bd = boundary_data(model, cl, cr);
    const double rho = std::min(bd.rho_left, bd.rho_right);
    const double S = opt.half_length > 0 ? opt.half_length : (0.5 * std::log(1e9) + 1.0) / rho;
    const int m = std::max(8, int(std::ceil(2 * S * opt.slices_per_unit)));
    sol.s_grid = Eigen::VectorXd::LinSpaced(m + 1, -S, S);
    const double h = sol.s_grid[1] - sol.s_grid[0];

    // initial guess
    std::vector<Eigen::VectorXd> y(m + 1);
    if (initial_guess) {
        if (static_cast<int>(initial_guess->size()) != m + 1)
            throw ConfigError("connect_orbit_bvp: initial guess has wrong slice count");
        for (int i = 0; i <= m; ++i) y[i] = model.from_field((*initial_guess)[i]);
    } else {
        const auto guess = morse_initial_guess(left, right, H, sol.s_grid);
        for (int i = 0; i <= m; ++i) y[i] = model.from_field(guess[i]);
    }

    // re-anchor the right endpoint lift to the guess
    if (target.lattice) {
        const double L = *target.lattice;
        FieldMap end = model.to_field(y[m]);
        Eigen::VectorXd shift = mean_value(end) - mean_value(right.f);
        for (int i = 0; i < shift.size(); ++i) shift[i] = std::round(shift[i] / L) * L;
        if (shift.cwiseAbs().maxCoeff() > 0) {
            sol.right.f = right.f + constant_field(d, target, shift);
            cr = model.from_field(sol.right.f);
            bd = boundary_data(model, cl, cr);
        }
    }

    const int rows_l = static_cast<int>(bd.rows_left.rows());
    const int rows_r = static_cast<int>(bd.rows_right.rows());
    const int deficit = (m + 1) * N - (m * N + rows_l + rows_r);
    if (deficit != 0 && deficit != 1)
        throw ConfigError("connect_orbit_bvp: endpoint index difference not supported (" +
                          std::to_string(deficit) + ")");

    // phase condition: fix the time shift against the initial guess
    const int mid = m / 2;
    Eigen::VectorXd phase_vec = model.F(y[mid]);
    if (phase_vec.norm() < 1e-12) phase_vec.setOnes();
    phase_vec.normalize();
    const Eigen::VectorXd phase_anchor = y[mid];

    std::vector<StagePair> stages(m);
    std::vector<Eigen::VectorXd> R(m);
    std::vector<Eigen::MatrixXd> dRl(m), dRr(m);
    const int total_rows = m * N + rows_l + rows_r + deficit;
    const int total_cols = (m + 1) * N;

    auto assemble_residual = [&](std::vector<Eigen::VectorXd>& yy, bool with_jac) {
        Eigen::VectorXd res(total_rows);
        for (int i = 0; i < m; ++i) {
            interval_residual(model, h, yy[i], yy[i + 1], stages[i], R[i],
                              with_jac ? &dRl[i] : nullptr, with_jac ? &dRr[i] : nullptr);
            res.segment(i * N, N) = R[i];
        }
        res.segment(m * N, rows_l) = bd.rows_left * (yy[0] - cl);
        res.segment(m * N + rows_l, rows_r) = bd.rows_right * (yy[m] - cr);
        if (deficit == 1)
            res[total_rows - 1] = phase_vec.dot(yy[mid] - phase_anchor);
        return res;
    };

    Eigen::SparseMatrix<double> J(total_rows, total_cols);
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;

    double res_norm = 0.0;
    int iter = 0;
    for (; iter < opt.max_iter; ++iter) {
        Eigen::VectorXd res = assemble_residual(y, true);
        res_norm = res.norm();
        sol.newton_residuals.push_back(res_norm);
        if (res_norm < opt.tol) break;

        trip.clear();
        for (int i = 0; i < m; ++i)
            for (int r = 0; r < N; ++r)
                for (int c = 0; c < N; ++c) {
                    if (dRl[i](r, c) != 0.0) trip.emplace_back(i * N + r, i * N + c, dRl[i](r, c));
                    if (dRr[i](r, c) != 0.0)
                        trip.emplace_back(i * N + r, (i + 1) * N + c, dRr[i](r, c));
                }
        for (int r = 0; r < rows_l; ++r)
            for (int c = 0; c < N; ++c)
                trip.emplace_back(m * N + r, c, bd.rows_left(r, c));
        for (int r = 0; r < rows_r; ++r)
            for (int c = 0; c < N; ++c)
                trip.emplace_back(m * N + rows_l + r, m * N + c, bd.rows_right(r, c));
        if (deficit == 1)
            for (int c = 0; c < N; ++c)
                trip.emplace_back(total_rows - 1, mid * N + c, phase_vec[c]);
        J.setFromTriplets(trip.begin(), trip.end());
        lu.compute(J);
        if (lu.info() != Eigen::Success)
            throw NumericalError("connect_orbit_bvp: singular collocation Jacobian");
        const Eigen::VectorXd step = lu.solve(res);

        double t = 1.0;
        std::vector<Eigen::VectorXd> trial(m + 1);
        bool accepted = false;
        for (int ls = 0; ls < 9; ++ls) {
            for (int i = 0; i <= m; ++i) trial[i] = y[i] - t * step.segment(i * N, N);
            const double rn = assemble_residual(trial, false).norm();
            if (rn < res_norm * (1.0 - 1e-4 * t) || rn < opt.tol) {
                y = trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted)
            throw NumericalError("connect_orbit_bvp: Newton line search failed at residual " +
                                 std::to_string(res_norm));
    }
    if (res_norm >= opt.tol)
        throw NumericalError("connect_orbit_bvp: Newton did not converge (residual " +
                             std::to_string(res_norm) + ")");
    sol.newton_iterations = iter;

    // boundary defect: remaining distance to the critical points at +-S
    sol.boundary_defect =
        std::max((y[0] - cl).norm(), (y[m] - cr).norm()) * std::sqrt(d->kappa);
    if (sol.boundary_defect > opt.boundary_tol)
        throw NumericalError("connect_orbit_bvp: boundary defect " +
                             std::to_string(sol.boundary_defect) +
                             " above tolerance; enlarge S");

    // final diagnostics
    sol.residual = std::sqrt(d->kappa / h) *
                   std::sqrt([&] {
                       double s2 = 0.0;
                       for (int i = 0; i < m; ++i) s2 += R[i].squaredNorm();
                       return s2;
                   }());
    double energy = 0.0;
    for (int i = 0; i < m; ++i) {
        const Eigen::VectorXd f1 = model.F(y[i]), f4 = model.F(y[i + 1]);
        const Eigen::VectorXd f2 = model.F(stages[i].Y2), f3 = model.F(stages[i].Y3);
        energy += h * (kB[0] * f1.squaredNorm() + kB[1] * f2.squaredNorm() +
                       kB[2] * f3.squaredNorm() + kB[3] * f4.squaredNorm());
    }
    sol.energy = d->kappa * energy;

    sol.slices.reserve(m + 1);
    for (int i = 0; i <= m; ++i) sol.slices.push_back(model.to_field(y[i]));
    sol.action_values.resize(m + 1);
    for (int i = 0; i <= m; ++i)
        sol.action_values[i] = perturbed_action_eps(sol.slices[i], H, eps);
    sol.action_drop = perturbed_action_eps(sol.left.f, H, eps) -
                      perturbed_action_eps(sol.right.f, H, eps);

    for (int i = 0; i <= m; ++i) {
        const FieldMap& u = sol.slices[i];
        const Eigen::VectorXd mean = mean_value(u);
        double osc = 0.0;
        for (int p = 0; p < d->num_nodes(); ++p)
            osc = std::max(osc, (u.values.col(p) - mean).norm());
        sol.max_oscillation = std::max(sol.max_oscillation, osc);
        for (int ax = 0; ax < 3; ++ax) {
            const FieldMap du = reeb_derivative(u, ax);
            for (int p = 0; p < d->num_nodes(); ++p)
                sol.sup_frame_deriv = std::max(sol.sup_frame_deriv, du.values.col(p).norm());
        }
    }
    return sol;
}

FieldMap TrajectorySolution::s_derivative(int i, const HamiltonianSpec& H) const {
    const FieldMap& u = slices[i];
    const FieldMap grad = action_gradient(u, &H);  // D u - grad H(u)
    const FieldMap du = dirac_apply(u);
    // du/ds = -(eps^{-1} D u - grad H(u)) = -D u / eps + grad H(u)
    return du * (-1.0 / epsilon) + (du - grad);
}

DecayFit decay_rate(const TrajectorySolution& u, const HamiltonianSpec& H,
                    double tail_fraction) {
    const int m = static_cast<int>(u.slices.size());
    if (m < 8) throw ConfigError("decay_rate: too few slices");
    std::vector<double> phi(m);
    double phimax = 0.0;
    for (int i = 0; i < m; ++i) {
        FieldMap du = u.s_derivative(i, H);
        phi[i] = std::sqrt(u.slices[i].domain->kappa) * du.l2_norm();
        phimax = std::max(phimax, phi[i]);
    }
    auto fit = [&](int lo, int hi, double sign, double& rho, double& r2) {
        int n = 0;
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        for (int i = lo; i <= hi; ++i) {
            if (phi[i] < 1e-12 * std::max(1.0, phimax))
                throw NumericalError("decay_rate: zero signal in tail window");
            const double x = u.s_grid[i], yv = std::log(phi[i]);
            sx += x;
            sy += yv;
            sxx += x * x;
            sxy += x * yv;
            syy += yv * yv;
            ++n;
        }
        const double denom = n * sxx - sx * sx;
        const double slope = (n * sxy - sx * sy) / denom;
        const double ss_tot = syy - sy * sy / n;
        const double ss_res = ss_tot - slope * (sxy - sx * sy / n);
        r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
        rho = sign * slope;
        if (r2 < 0.99) throw NumericalError("decay_rate: poor tail fit (r2 too low)");
        if (rho <= 0) throw NumericalError("decay_rate: non-monotone tail");
    };
    const int tail = std::max(4, int(tail_fraction * m / 2));
    DecayFit out;
    fit(2, 2 + tail, +1.0, out.rho_left, out.r2_left);
    fit(m - 3 - tail, m - 3, -1.0, out.rho_right, out.r2_right);
    return out;
}

AdiabaticReport adiabatic_experiment(const HamiltonianSpec& H,
                                     const std::vector<double>& eps_list,
                                     const CriticalPoint& left, const CriticalPoint& right,
                                     const BvpOptions& opt) {
    AdiabaticReport rep;
    for (double eps : eps_list) {
        const TrajectorySolution sol = connect_orbit_bvp(left, right, H, eps, opt);
        AdiabaticRecord rec;
        rec.eps = eps;
        rec.oscillation = sol.max_oscillation;
        rec.sup_frame_deriv = sol.sup_frame_deriv;
        rec.c_fit = sol.sup_frame_deriv / eps;
        rec.energy = sol.energy;
        rec.action_drop = sol.action_drop;
        rep.records.push_back(rec);
    }
    rep.c_ratio_ok = true;
    for (std::size_t i = 0; i + 1 < rep.records.size(); ++i) {
        const double c0 = rep.records[i].c_fit, c1 = rep.records[i + 1].c_fit;
        if (c0 < 1e-9 || c1 < 1e-9) continue;  // no frame-derivative signal to compare
        const double drift = std::abs(c1 / c0 - 1.0);
        rep.max_ratio_drift = std::max(rep.max_ratio_drift, drift);
        if (drift > 0.25) rep.c_ratio_ok = false;
    }
    return rep;
}

}  // namespace hkfloer
