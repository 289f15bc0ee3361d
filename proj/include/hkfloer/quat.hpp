#pragma once

// Quaternion algebra underlying the hyperkaehler target H^n: the Hamilton
// product, the triple of complex structures I, J, K acting by left
// multiplication, the sphere of structures J_lambda, and the symplectic
// forms omega_lambda(xi, eta) = <J_lambda xi, eta>.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace hkfloer {

struct Quat {
    double w = 0.0, x = 0.0, y = 0.0, z = 0.0;

    constexpr Quat() = default;
    constexpr Quat(double w_, double x_, double y_, double z_)
        : w(w_), x(x_), y(y_), z(z_) {}

    constexpr Quat operator+(const Quat& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
    constexpr Quat operator-(const Quat& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
    constexpr Quat operator-() const { return {-w, -x, -y, -z}; }
    constexpr Quat operator*(double s) const { return {w * s, x * s, y * s, z * s}; }

    constexpr Quat conj() const { return {w, -x, -y, -z}; }
    constexpr double norm2() const { return w * w + x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }

    bool operator==(const Quat&) const = default;
};

/// Hamilton product. Non-commutative; |ab| = |a||b|.
constexpr Quat qmul(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

constexpr Quat operator*(const Quat& a, const Quat& b) { return qmul(a, b); }

/// Real Euclidean inner product on H = R^4, <a,b> = Re(a conj(b)).
constexpr double qdot(const Quat& a, const Quat& b) {
    return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

inline const Quat kQuatOne{1, 0, 0, 0};
inline const Quat kQuatI{0, 1, 0, 0};
inline const Quat kQuatJ{0, 0, 1, 0};
inline const Quat kQuatK{0, 0, 0, 1};

/// Purely imaginary quaternion, the parameter lambda of J_lambda.
/// A unit ImQuat squares to -1 under qmul.
struct ImQuat {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr ImQuat() = default;
    constexpr ImQuat(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Quat as_quat() const { return {0.0, x, y, z}; }
    constexpr double norm2() const { return x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }
};

/// A point or tangent vector of H^n, n >= 1.
struct QuatVec {
    std::vector<Quat> entries;

    QuatVec() = default;
    explicit QuatVec(std::size_t n) : entries(n) {}
    QuatVec(std::initializer_list<Quat> list) : entries(list) {}

    std::size_t size() const { return entries.size(); }
    Quat& operator[](std::size_t k) { return entries[k]; }
    const Quat& operator[](std::size_t k) const { return entries[k]; }
};

/// J_lambda = lambda_1 I + lambda_2 J + lambda_3 K, acting entrywise by
/// left multiplication. lambda need not be unit.
QuatVec structure_apply(const ImQuat& lambda, const QuatVec& v);

/// Real L2-type inner product on H^n, sum of Re(a_k conj(b_k)).
double inner(const QuatVec& a, const QuatVec& b);

/// omega_lambda(xi, eta) = <J_lambda xi, eta>. Antisymmetric, linear in lambda.
double omega(const ImQuat& lambda, const QuatVec& xi, const QuatVec& eta);

/// 4x4 matrix of left multiplication by q on R^4 in the basis (1, i, j, k).
Eigen::Matrix4d left_mult_matrix(const Quat& q);

/// 4x4 matrix of right multiplication by q, v -> v q.
Eigen::Matrix4d right_mult_matrix(const Quat& q);

/// Block-diagonal matrix of entrywise left multiplication by q on H^n = R^{4n}.
Eigen::MatrixXd left_mult_matrix_n(const Quat& q, int n);

inline Eigen::Vector4d quat_to_vec(const Quat& q) { return {q.w, q.x, q.y, q.z}; }
inline Quat vec_to_quat(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

}  // namespace hkfloer
