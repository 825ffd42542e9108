#include "gravpano/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "gravpano/errors.hpp"

namespace gravpano {

namespace {

Mat3 skew(const Vec3& v) {
  Mat3 S;
  S << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return S;
}

// Coefficient matrices of the unnormalized Cayley yaw: M0 + s M1 + s^2 M2.
const std::array<Mat3, 3>& cayley_terms() {
  static const std::array<Mat3, 3> terms = [] {
    std::array<Mat3, 3> m;
    m[0] = Mat3::Identity();
    m[1] << 0, 0, 2, 0, 0, 0, -2, 0, 0;
    m[2] = Vec3(-1, 1, -1).asDiagonal();
    return m;
  }();
  return terms;
}

std::array<double, 9> monomials(double s, double f, double lambda) {
  std::array<double, 9> m{};
  const double sp[3] = {1.0, s, s * s};
  for (int k = 0; k < 3; ++k) {
    m[row9_index(k, FTerm::kFLambda)] = sp[k] * f * lambda;
    m[row9_index(k, FTerm::kF)] = sp[k] * f;
    m[row9_index(k, FTerm::kOne)] = sp[k];
  }
  return m;
}

double dot9(const ConstraintRows::Row9& a, const std::array<double, 9>& m) {
  double acc = 0.0;
  for (int i = 0; i < 9; ++i) acc += a[i] * m[i];
  return acc;
}

double abs_dot9(const ConstraintRows::Row9& a, const std::array<double, 9>& m) {
  double acc = 0.0;
  for (int i = 0; i < 9; ++i) acc += std::abs(a[i] * m[i]);
  return acc;
}

std::array<double, 12> zero_distortion_row(const ConstraintRows::SkewRow& r) {
  std::array<double, 12> a{};
  for (int k = 2, block = 0; k >= 0; --k, ++block) {
    const int fi = row9_index(k, FTerm::kF);
    const int oi = row9_index(k, FTerm::kOne);
    a[4 * block + 0] = r.w_part[fi];
    a[4 * block + 1] = r.plain[fi];
    a[4 * block + 2] = r.w_part[oi];
    a[4 * block + 3] = r.plain[oi];
  }
  return a;
}

// Distorted radius for undistorted radius ru; NaN when out of range.
double distorted_radius(double ru, double lambda) {
  const double disc = 1.0 - 4.0 * lambda * ru * ru;
  if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
  return 2.0 * ru / (1.0 + std::sqrt(disc));
}

// Maps p through H (pixel-homogeneous) and returns the pixel distance to q,
// or +inf when the image falls outside the distortable range.
double one_way_error(const Mat3& H, const DistortedPoint& from, double lambda_from,
                     const DistortedPoint& to, double lambda_to) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double ns_from = from.norm_scale;
  const double ns_to = to.norm_scale;
  const Vec3 pu = undistort(from, lambda_from);
  const Vec3 m = H * Vec3(pu.x() * ns_from, pu.y() * ns_from, pu.z());
  if (!std::isfinite(m.z()) || std::abs(m.z()) < 1e-300) return kInf;
  const double xu = m.x() / (ns_to * m.z());
  const double yu = m.y() / (ns_to * m.z());
  const double ru = std::hypot(xu, yu);
  double k = 1.0;
  if (ru > 0.0) {
    const double rd = distorted_radius(ru, lambda_to);
    if (!std::isfinite(rd)) return kInf;
    k = rd / ru;
  }
  const double du = k * xu * ns_to - to.u;
  const double dv = k * yu * ns_to - to.v;
  const double e = std::hypot(du, dv);
  return std::isfinite(e) ? e : kInf;
}

}  // namespace

Mat3 StitchModel::relative_rotation() const {
  return R2.transpose() * cayley_yaw(s) * R1;
}

std::array<double, 12> ConstraintRows::a1() const { return zero_distortion_row(rows[0]); }
std::array<double, 12> ConstraintRows::a2() const { return zero_distortion_row(rows[1]); }

std::array<double, 6> ConstraintRows::a3() const {
  std::array<double, 6> a{};
  for (int k = 2, block = 0; k >= 0; --k, ++block) {
    a[2 * block + 0] = b[row9_index(k, FTerm::kF)];
    a[2 * block + 1] = b[row9_index(k, FTerm::kOne)];
  }
  return a;
}

double ConstraintRows::evaluate(int row, double s, double f1, double w, double lambda1,
                                double lambda2) const {
  const auto m = monomials(s, f1, lambda1);
  if (row == 2) return dot9(b, m);
  const SkewRow& r = rows.at(row);
  return w * dot9(r.w_part, m) + dot9(r.plain, m) + lambda2 * dot9(r.lambda2_part, m);
}

double ConstraintRows::term_scale(int row, double s, double f1, double w, double lambda1,
                                  double lambda2) const {
  const auto m = monomials(s, f1, lambda1);
  if (row == 2) return abs_dot9(b, m);
  const SkewRow& r = rows.at(row);
  return std::abs(w) * abs_dot9(r.w_part, m) + abs_dot9(r.plain, m) +
         std::abs(lambda2) * abs_dot9(r.lambda2_part, m);
}

GravityPrior gravity_alignment(const Vec3& gravity) {
  const double n = gravity.norm();
  if (!std::isfinite(n) || n == 0.0) {
    throw InvalidInput("gravity vector must be finite and nonzero");
  }
  const Vec3 g = gravity / n;
  const Vec3 target(0.0, -1.0, 0.0);
  const double c = g.dot(target);
  if (1.0 + c < 1e-12) {
    throw SingularConfiguration(
        "gravity is anti-parallel to the target vertical; alignment axis is undefined");
  }
  // Rodrigues form of the minimal rotation taking g onto target.
  const Mat3 K = skew(g.cross(target));
  GravityPrior prior;
  prior.rotation = Mat3::Identity() + K + K * K / (1.0 + c);
  return prior;
}

Vec3 undistort(const DistortedPoint& p, double lambda) {
  const double x = p.x();
  const double y = p.y();
  return {x, y, 1.0 + lambda * (x * x + y * y)};
}

DistortedPoint distort(const Vec3& q, double lambda, double norm_scale) {
  if (q.z() == 0.0) throw OutOfRange("point at infinity cannot be distorted");
  const double xu = q.x() / q.z();
  const double yu = q.y() / q.z();
  const double ru = std::hypot(xu, yu);
  double k = 1.0;
  if (ru > 0.0) {
    const double rd = distorted_radius(ru, lambda);
    if (!std::isfinite(rd)) {
      throw OutOfRange("undistorted radius has no distorted preimage for this lambda");
    }
    k = rd / ru;
  }
  return {k * xu * norm_scale, k * yu * norm_scale, norm_scale};
}

Mat3 cayley_yaw_unnormalized(double s) {
  Mat3 R;
  R << 1 - s * s, 0, 2 * s, 0, 1 + s * s, 0, -2 * s, 0, 1 - s * s;
  return R;
}

Mat3 cayley_yaw(double s) { return cayley_yaw_unnormalized(s) / (1.0 + s * s); }

ConstraintRows expand_constraints(const Correspondence& c, ExpansionMode mode) {
  const bool distortion = mode == ExpansionMode::kDistortion;
  const Mat3& R1 = c.g1.rotation;
  const Mat3 R2t = c.g2.rotation.transpose();

  // q1 = R1 [x1, y1, f z1] = V1 + f Vf + f*lambda1 Vfl
  std::array<Vec3, 3> V;
  V[static_cast<int>(FTerm::kOne)] = R1 * Vec3(c.p1.x(), c.p1.y(), 0.0);
  V[static_cast<int>(FTerm::kF)] = R1.col(2);
  V[static_cast<int>(FTerm::kFLambda)] =
      distortion ? Vec3(R1.col(2) * c.p1.radius2()) : Vec3::Zero();

  // n = R2^T Ry(s) q1, one 3-vector per monomial.
  const auto& M = cayley_terms();
  std::array<Vec3, 9> n;
  for (int k = 0; k < 3; ++k) {
    const Mat3 A = R2t * M[k];
    for (int t = 0; t < 3; ++t) {
      n[row9_index(k, static_cast<FTerm>(t))] = A * V[t];
    }
  }

  const double x2 = c.p2.x();
  const double y2 = c.p2.y();
  const double r22 = distortion ? c.p2.radius2() : 0.0;

  ConstraintRows out;
  out.mode = mode;
  for (int i = 0; i < 9; ++i) {
    const Vec3& v = n[i];
    // [p2]x rows: (0, -z2, y2), (z2, 0, -x2), (-y2, x2, 0); z2 = 1 + lambda2 r2^2.
    out.rows[0].w_part[i] = y2 * v.z();
    out.rows[0].plain[i] = -v.y();
    out.rows[0].lambda2_part[i] = -r22 * v.y();
    out.rows[1].w_part[i] = -x2 * v.z();
    out.rows[1].plain[i] = v.x();
    out.rows[1].lambda2_part[i] = r22 * v.x();
    out.b[i] = x2 * v.y() - y2 * v.x();
  }
  if (!distortion) {
    // Keep the structural zeros exact.
    for (int k = 0; k < 3; ++k) {
      const int i = row9_index(k, FTerm::kFLambda);
      out.rows[0].w_part[i] = out.rows[0].plain[i] = 0.0;
      out.rows[1].w_part[i] = out.rows[1].plain[i] = 0.0;
      out.b[i] = 0.0;
    }
  }
  return out;
}

double scale_fix_divisor(const Mat3& H) {
  if (std::abs(H(2, 2)) > 1e-12) return H(2, 2);
  Eigen::Index r = 0, c = 0;
  H.cwiseAbs().maxCoeff(&r, &c);
  return H(r, c) != 0.0 ? H(r, c) : 1.0;
}

StitchModel compose_model(double s, double f1, double f2, double lambda1, double lambda2,
                          const GravityPrior& g1, const GravityPrior& g2) {
  if (!(f1 > 0.0) || !(f2 > 0.0) || !std::isfinite(f1) || !std::isfinite(f2)) {
    throw InvalidInput("focal lengths must be positive and finite");
  }
  StitchModel m;
  m.s = s;
  m.theta = 2.0 * std::atan(s);
  m.f1 = f1;
  m.f2 = f2;
  m.lambda1 = lambda1;
  m.lambda2 = lambda2;
  m.R1 = g1.rotation;
  m.R2 = g2.rotation;
  const Mat3 R = m.relative_rotation();
  Mat3 H = Vec3(f2, f2, 1.0).asDiagonal() * R * Vec3(1.0 / f1, 1.0 / f1, 1.0).asDiagonal();
  const double d = scale_fix_divisor(H);
  m.H = H / d;
  m.G = (f1 / f2) * m.H;
  return m;
}

double transfer_error(const StitchModel& model, const Correspondence& c, TransferMode mode) {
  const double fwd = one_way_error(model.H, c.p1, model.lambda1, c.p2, model.lambda2);
  if (mode == TransferMode::kForward) return fwd;
  const Mat3 Hinv = model.H.inverse();
  const double bwd = one_way_error(Hinv, c.p2, model.lambda2, c.p1, model.lambda1);
  return 0.5 * (fwd + bwd);
}

double rotation_angle(const Mat3& R) {
  const double cos_part = 0.5 * (R.trace() - 1.0);
  const Vec3 w(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  return std::atan2(0.5 * w.norm(), cos_part);
}

Mat3 rotation_about_x(double a) {
  Mat3 R;
  R << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return R;
}

Mat3 rotation_about_y(double a) {
  Mat3 R;
  R << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return R;
}

Mat3 rotation_about_z(double a) {
  Mat3 R;
  R << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return R;
}

}  // namespace gravpano
