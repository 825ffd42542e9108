// Normalized four-point DLT and its decomposition into focal lengths and yaw.

#include <Eigen/SVD>

#include "solver_common.hpp"

namespace gravpano {

namespace {

// Similarity moving the centroid to the origin with mean distance sqrt(2).
Mat3 hartley_transform(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double d = 0.0;
  for (const auto& p : pts) d += (p - c).norm();
  d /= static_cast<double>(pts.size());
  if (!(d > 0.0)) throw DegenerateConfiguration("H4: all points coincide");
  const double k = std::sqrt(2.0) / d;
  Mat3 T;
  T << k, 0, -k * c.x(), 0, k, -k * c.y(), 0, 0, 1;
  return T;
}

}  // namespace

Mat3 solve_h4dlt(std::span<const Correspondence> cs) {
  const int n = static_cast<int>(cs.size());
  if (n < 4) throw InvalidInput("H4: at least 4 correspondences are required");
  std::vector<Eigen::Vector2d> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = {cs[i].p1.u, cs[i].p1.v};
    b[i] = {cs[i].p2.u, cs[i].p2.v};
  }
  const Mat3 T1 = hartley_transform(a);
  const Mat3 T2 = hartley_transform(b);
  Eigen::MatrixXd A(2 * n, 9);
  for (int i = 0; i < n; ++i) {
    const Vec3 p = T1 * Vec3(a[i].x(), a[i].y(), 1.0);
    const Vec3 q = T2 * Vec3(b[i].x(), b[i].y(), 1.0);
    A.row(2 * i) << 0, 0, 0, -q.z() * p.transpose(), q.y() * p.transpose();
    A.row(2 * i + 1) << q.z() * p.transpose(), 0, 0, 0, -q.x() * p.transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(7) > 1e-10 * sv(0))) {
    throw DegenerateConfiguration("H4: rank-deficient design (collinear or duplicated points)");
  }
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Mat3 Hn;
  Hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  Mat3 H = T2.inverse() * Hn * T1;
  return H / scale_fix_divisor(H);
}

std::optional<StitchModel> model_from_homography(const Mat3& H_in, const GravityPrior& g1,
                                                 const GravityPrior& g2) {
  Mat3 H = H_in / scale_fix_divisor(H_in);
  if (!H.allFinite()) return std::nullopt;
  // H diag(f1^2, f1^2, 1) H^T is proportional to diag(f2^2, f2^2, 1); its
  // off-diagonal entries are linear in f1^2.
  double num = 0.0, den = 0.0;
  for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
    const double ak = H(i, 0) * H(j, 0) + H(i, 1) * H(j, 1);
    const double bk = H(i, 2) * H(j, 2);
    num -= ak * bk;
    den += ak * ak;
  }
  if (!(den > 0.0)) return std::nullopt;
  const double f1sq = num / den;
  if (!(f1sq > 0.0)) return std::nullopt;
  const Mat3 M = H * Vec3(f1sq, f1sq, 1.0).asDiagonal() * H.transpose();
  if (!(M(2, 2) > 0.0)) return std::nullopt;
  const double f2sq = 0.5 * (M(0, 0) + M(1, 1)) / M(2, 2);
  if (!(f2sq > 0.0)) return std::nullopt;
  const double f1 = std::sqrt(f1sq);
  const double f2 = std::sqrt(f2sq);

  Mat3 R = Vec3(1.0 / f2, 1.0 / f2, 1.0).asDiagonal() * H * Vec3(f1, f1, 1.0).asDiagonal();
  if (R.determinant() < 0.0) R = -R;
  Eigen::JacobiSVD<Mat3> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  R = svd.matrixU() * svd.matrixV().transpose();
  const Mat3 Ry = g2.rotation * R * g1.rotation.transpose();
  const double theta = std::atan2(Ry(0, 2), Ry(0, 0));

  StitchModel m;
  m.s = std::tan(0.5 * theta);
  m.theta = theta;
  m.f1 = f1;
  m.f2 = f2;
  m.R1 = g1.rotation;
  m.R2 = g2.rotation;
  m.H = H;
  m.G = (f1 / f2) * H;
  m.parametric = false;
  return m;
}

}  // namespace gravpano
