#include "hkfloer/quat.hpp"

namespace hkfloer {

QuatVec structure_apply(const ImQuat& lambda, const QuatVec& v) {
    QuatVec out(v.size());
    const Quat lq = lambda.as_quat();
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = qmul(lq, v[k]);
    return out;
}

double inner(const QuatVec& a, const QuatVec& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += qdot(a[k], b[k]);
    return s;
}

double omega(const ImQuat& lambda, const QuatVec& xi, const QuatVec& eta) {
    return inner(structure_apply(lambda, xi), eta);
}

Eigen::Matrix4d left_mult_matrix(const Quat& q) {
    Eigen::Matrix4d m;
    // Columns are q*1, q*i, q*j, q*k.
    m << q.w, -q.x, -q.y, -q.z,
         q.x,  q.w, -q.z,  q.y,
         q.y,  q.z,  q.w, -q.x,
         q.z, -q.y,  q.x,  q.w;
    return m;
}

Eigen::Matrix4d right_mult_matrix(const Quat& q) {
    Eigen::Matrix4d m;
    // Columns are 1*q, i*q, j*q, k*q.
    m << q.w, -q.x, -q.y, -q.z,
         q.x,  q.w,  q.z, -q.y,
         q.y, -q.z,  q.w,  q.x,
         q.z,  q.y, -q.x,  q.w;
    return m;
}

Eigen::MatrixXd left_mult_matrix_n(const Quat& q, int n) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4 * n, 4 * n);
    const Eigen::Matrix4d b = left_mult_matrix(q);
    for (int k = 0; k < n; ++k) m.block<4, 4>(4 * k, 4 * k) = b;
    return m;
}

}  // namespace hkfloer
