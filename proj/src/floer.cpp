#include "hkfloer/floer.hpp"

namespace hkfloer {

ChainComplex build_complex(const HamiltonianSpec& H, std::shared_ptr<const FrameDomain> d,
                           const Target& target, const ComplexOptions& opt) {
    ChainComplex c;
    c.n = target.n;
    const auto seeds = critical_seeds(H, d, target);
    c.generators = find_critical_points(H, d, target, seeds, opt.newton);
    for (const auto& g : c.generators) {
        if (!g.nondegenerate)
            throw NumericalError("build_complex: degenerate critical point");
    }
    const int top = 4 * c.n;
    c.by_degree.assign(top + 1, {});
    for (int i = 0; i < static_cast<int>(c.generators.size()); ++i) {
        const int mu = c.generators[i].mu;
        if (mu < 0 || mu > top)
            throw NumericalError("build_complex: index outside [0, 4n]");
        c.by_degree[mu].push_back(i);
    }

    // boundary CF_k -> CF_{k-1}: counted pairs have mu(f-) - mu(f+) = 1,
    // i.e. Morse index difference ind(x+) - ind(x-) = 1
    c.boundary.assign(top + 1, Eigen::MatrixXi());
    c.trajectory_counts.assign(top + 1, Eigen::MatrixXi());
    int spot_budget = opt.spot_check_pairs;
    for (int k = 1; k <= top; ++k) {
        const auto& rows = c.by_degree[k - 1];
        const auto& cols = c.by_degree[k];
        Eigen::MatrixXi b = Eigen::MatrixXi::Zero(rows.size(), cols.size());
        Eigen::MatrixXi counts = b;
        for (std::size_t cj = 0; cj < cols.size(); ++cj) {
            for (std::size_t ri = 0; ri < rows.size(); ++ri) {
                const auto& upper = c.generators[cols[cj]];   // mu = k (x-)
                const auto& lower = c.generators[rows[ri]];   // mu = k-1 (x+)
                const auto res =
                    morse_trajectories(upper.point(), lower.point(), H);
                counts(ri, cj) = res.count;
                b(ri, cj) = res.mod2;
                if (res.count > 0 && spot_budget > 0) {
                    --spot_budget;
                    const TrajectorySolution s =
                        connect_orbit_bvp(upper, lower, H, opt.spot_eps);
                    if (s.residual > 1e-7)
                        throw NumericalError("build_complex: spot-check trajectory residual");
                }
            }
        }
        c.boundary[k] = b;
        c.trajectory_counts[k] = counts;
    }
    return c;
}

bool verify_boundary_squared(const ChainComplex& c) {
    for (int k = 2; k <= 4 * c.n; ++k) {
        if (c.boundary[k].size() == 0 || c.boundary[k - 1].size() == 0) continue;
        const Eigen::MatrixXi prod = c.boundary[k - 1] * c.boundary[k];
        for (int i = 0; i < prod.rows(); ++i)
            for (int j = 0; j < prod.cols(); ++j)
                if (prod(i, j) % 2 != 0) return false;
    }
    return true;
}

int gf2_rank(Eigen::MatrixXi m) {
    const int rows = static_cast<int>(m.rows()), cols = static_cast<int>(m.cols());
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) &= 1;
    int rank = 0;
    int row = 0;
    for (int col = 0; col < cols && row < rows; ++col) {
        int pivot = -1;
        for (int r = row; r < rows; ++r)
            if (m(r, col)) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        m.row(pivot).swap(m.row(row));
        for (int r = 0; r < rows; ++r)
            if (r != row && m(r, col))
                for (int cc = col; cc < cols; ++cc) m(r, cc) ^= m(row, cc);
        ++rank;
        ++row;
    }
    return rank;
}

std::vector<int> homology(const ChainComplex& c) {
    if (!verify_boundary_squared(c))
        throw NumericalError("homology: boundary squared is nonzero");
    const int top = 4 * c.n;
    std::vector<int> dims(top + 1, 0);
    for (int k = 0; k <= top; ++k) {
        const int nk = c.degree_count(k);
        const int rank_k = (k >= 1 && c.boundary[k].size()) ? gf2_rank(c.boundary[k]) : 0;
        const int rank_k1 =
            (k + 1 <= top && c.boundary[k + 1].size()) ? gf2_rank(c.boundary[k + 1]) : 0;
        dims[k] = nk - rank_k - rank_k1;
    }
    return dims;
}

long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

bool betti_compare(const std::vector<int>& dims, const Target& target) {
    if (!target.lattice) return false;
    const int top = 4 * target.n;
    if (static_cast<int>(dims.size()) != top + 1) return false;
    for (int k = 0; k <= top; ++k)
        if (dims[k] != binomial(top, k)) return false;
    return true;
}

}  // namespace hkfloer
