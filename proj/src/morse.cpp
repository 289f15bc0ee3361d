#include <algorithm>
#include <cmath>

#include "hkfloer/dynamics.hpp"

namespace hkfloer {

std::vector<CircleCritical> circle_critical_points(const CircleFactor& h) {
    const double L = h.lattice;
    const int scan = 4096;
    std::vector<double> roots;
    double prev_x = 0.0, prev_v = h.deriv(0.0);
    for (int i = 1; i <= scan; ++i) {
        const double x = L * i / scan;
        const double v = h.deriv(x);
        if (prev_v == 0.0) roots.push_back(prev_x);
        else if (prev_v * v < 0.0) {
            double a = prev_x, b = x, fa = prev_v;
            for (int it = 0; it < 80; ++it) {
                const double m = 0.5 * (a + b), fm = h.deriv(m);
                if (fa * fm <= 0.0) b = m;
                else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        prev_x = x;
        prev_v = v;
    }
    std::vector<CircleCritical> out;
    double scale = 0.0;
    for (const auto& t : h.terms) scale += std::abs(t.amplitude);
    for (double x : roots) {
        CircleCritical c;
        c.x = x < 0 ? x + L : x;
        c.value = h.eval(c.x);
        c.hess = h.deriv2(c.x);
        if (std::abs(c.hess) < 1e-8 * std::max(1.0, scale))
            throw NumericalError("circle factor has a degenerate critical point (Morse-Smale violation)");
        c.is_max = c.hess < 0.0;
        out.push_back(c);
    }
    std::sort(out.begin(), out.end(),
              [](const CircleCritical& a, const CircleCritical& b) { return a.x < b.x; });
    return out;
}

namespace {

// Index of the critical point of `crit` nearest to x mod L, or -1.
int locate(const std::vector<CircleCritical>& crit, double x, double L, double tol) {
    for (int i = 0; i < static_cast<int>(crit.size()); ++i) {
        double dist = std::abs(x - crit[i].x);
        dist = std::min(dist, L - dist);
        if (dist < tol) return i;
    }
    return -1;
}

// Trajectories of dx/ds = h'(x) from critical point a to b: one per arc whose
// endpoints are exactly {a, b}.  On the circle minima and maxima alternate,
// so an arc carries a single monotone trajectory from its min end to its max.
int circle_arc_count(const std::vector<CircleCritical>& crit, int a, int b) {
    const int n = static_cast<int>(crit.size());
    int count = 0;
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        if ((i == a && j == b) || (i == b && j == a)) ++count;
    }
    return count;
}

}  // namespace

TrajectoryCountResult morse_trajectories(const Eigen::VectorXd& xm, const Eigen::VectorXd& xp,
                                         const HamiltonianSpec& H) {
    const double L = H.lattice;
    double dist = 0.0;
    for (int i = 0; i < xm.size(); ++i) {
        const double di = std::abs(xm[i] - xp[i]);
        dist += std::min(di, L - di);
    }
    if (dist < 1e-9) throw ConfigError("morse_trajectories: distinct endpoints required");
    if (!H.separable())
        throw ConfigError("morse_trajectories: only separable Hamiltonians are counted exactly");

    const int im = morse_index(H, xm), ip = morse_index(H, xp);
    if (ip - im != 1)
        throw ConfigError("morse_trajectories: index difference must be 1");

    // Separable flow: each coordinate follows its own factor; in an index-1
    // transition exactly one coordinate moves.
    TrajectoryCountResult r;
    int moving = -1;
    for (int mu = 0; mu < xm.size(); ++mu) {
        double d = std::abs(xm[mu] - xp[mu]);
        d = std::min(d, L - d);
        if (d > 1e-8) {
            if (moving >= 0) return r;  // two coordinates differ: no index-1 orbit
            moving = mu;
        }
    }
    if (moving < 0) return r;

    const CircleFactor h = circle_factor(H, moving);
    const auto crit = circle_critical_points(h);
    const int a = locate(crit, xm[moving], L, 1e-6);
    const int b = locate(crit, xp[moving], L, 1e-6);
    if (a < 0 || b < 0)
        throw NumericalError("morse_trajectories: endpoint is not a factor critical point");
    if (crit[a].is_max || !crit[b].is_max) return r;  // flow goes min -> max per factor
    r.count = circle_arc_count(crit, a, b);
    r.mod2 = r.count & 1;
    return r;
}

}  // namespace hkfloer
