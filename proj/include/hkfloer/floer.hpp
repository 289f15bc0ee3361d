#pragma once

// The Floer chain complex in the Morse regime: generators are the critical
// points graded by the index mu_H, the boundary operator counts positive
// gradient trajectories mod 2 between generators of index difference one,
// and homology is computed by GF(2) elimination.

#include "hkfloer/dynamics.hpp"

namespace hkfloer {

struct ChainComplex {
    int n = 1;  // target quaternionic dimension (top grade 4n)
    std::vector<CriticalPoint> generators;          // sorted by mu descending
    std::vector<std::vector<int>> by_degree;        // generator indices per mu (0..4n)
    std::vector<Eigen::MatrixXi> boundary;          // per k: CF_k -> CF_{k-1}, entries mod 2
    std::vector<Eigen::MatrixXi> trajectory_counts; // provenance, integer counts

    int degree_count(int mu) const {
        return (mu >= 0 && mu <= 4 * n) ? static_cast<int>(by_degree[mu].size()) : 0;
    }
};

struct ComplexOptions {
    NewtonOptions newton;
    int spot_check_pairs = 0;  // verify this many counted pairs against the BVP
    double spot_eps = 0.1;
};

ChainComplex build_complex(const HamiltonianSpec& H, std::shared_ptr<const FrameDomain> d,
                           const Target& target, const ComplexOptions& opt = {});

/// boundary o boundary = 0 over GF(2).
bool verify_boundary_squared(const ChainComplex& c);

/// Homology dimensions per mu-degree by GF(2) elimination; requires d^2 = 0.
std::vector<int> homology(const ChainComplex& c);

/// Rank of a 0/1 matrix over GF(2).
int gf2_rank(Eigen::MatrixXi m);

/// Compare homology dimensions against binomial(4n, k) for the torus target.
bool betti_compare(const std::vector<int>& dims, const Target& target);

long binomial(int n, int k);

}  // namespace hkfloer
