#pragma once

#include <array>
#include <Eigen/Core>

namespace gravpano {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// A measured (distorted) image point. Coordinates are in pixels relative to
/// the principal point; `norm_scale` converts them to the normalized units in
/// which the division model and the solvers operate.
struct DistortedPoint {
  double u = 0.0;
  double v = 0.0;
  double norm_scale = 1.0;

  double x() const { return u / norm_scale; }
  double y() const { return v / norm_scale; }
  double radius2() const { return x() * x() + y() * y(); }
};

/// Known roll/pitch alignment of one camera. `rotation` maps camera
/// coordinates into a frame whose y-axis is vertical.
struct GravityPrior {
  Mat3 rotation = Mat3::Identity();
};

struct Correspondence {
  DistortedPoint p1;
  DistortedPoint p2;
  GravityPrior g1;
  GravityPrior g2;
};

/// Two-view model of a rotating camera pair under gravity priors.
///
/// Focal lengths are in pixels, distortion coefficients in normalized units.
/// `H` maps undistorted pixel-homogeneous points of image 1, that is
/// [u, v, 1 + lambda1 * r^2] with r measured in normalized units, onto those
/// of image 2. `G` is (f1 / f2) * H under the same scale fix.
struct StitchModel {
  double s = 0.0;
  double theta = 0.0;
  double f1 = 1.0;
  double f2 = 1.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Mat3 G = Mat3::Identity();
  Mat3 H = Mat3::Identity();
  Mat3 R1 = Mat3::Identity();
  Mat3 R2 = Mat3::Identity();
  // False for homographies not recomposed from (s, f, lambda), e.g. the DLT
  // baseline, whose scalar fields are a decomposition estimate.
  bool parametric = true;

  /// Full relative rotation R2^T Ry R1 (camera 1 to camera 2).
  Mat3 relative_rotation() const;
};

enum class ExpansionMode { kZeroDistortion, kDistortion };
enum class TransferMode { kForward, kSymmetric };

/// Constraint rows of [p2]x G p1 = 0 expanded into monomials.
///
/// Every coefficient block is a 9-vector over the monomial basis
/// [s^2 f l, s^2 f, s^2, s f l, s f, s, f l, f, 1] where f = f1 and l = lambda1
/// (normalized units). The first two rows additionally carry w = 1/f2 and
/// lambda2 linearly:
///   row = w * w_part + plain + lambda2 * lambda2_part.
/// The last row (`b`) never contains w or lambda2.
struct ConstraintRows {
  using Row9 = std::array<double, 9>;
  struct SkewRow {
    Row9 w_part{};
    Row9 plain{};
    Row9 lambda2_part{};
  };

  ExpansionMode mode = ExpansionMode::kZeroDistortion;
  std::array<SkewRow, 2> rows{};
  Row9 b{};

  /// Zero-distortion forms over [s^2fw, s^2f, s^2w, s^2, sfw, sf, sw, s, fw, f, w, 1].
  std::array<double, 12> a1() const;
  std::array<double, 12> a2() const;
  /// Zero-distortion last row over [s^2f, s^2, sf, s, f, 1].
  std::array<double, 6> a3() const;

  /// Row values at a parameter point (normalized units). Index 2 is `b`.
  double evaluate(int row, double s, double f1, double w, double lambda1,
                  double lambda2) const;
  /// Sum of absolute monomial terms; the scale against which a row residual
  /// is judged.
  double term_scale(int row, double s, double f1, double w, double lambda1,
                    double lambda2) const;
};

// Index into a Row9 for s^k (k = 0..2) and the f/lambda factor.
enum class FTerm { kFLambda = 0, kF = 1, kOne = 2 };
constexpr int row9_index(int s_power, FTerm term) {
  return (2 - s_power) * 3 + static_cast<int>(term);
}

/// Minimal-angle rotation taking the measured gravity direction to (0,-1,0).
GravityPrior gravity_alignment(const Vec3& gravity);

/// Division-model undistortion in normalized coordinates:
/// [x, y, 1 + lambda (x^2 + y^2)].
Vec3 undistort(const DistortedPoint& p, double lambda);

/// Inverse of `undistort`: returns the distorted point (in the pixel units of
/// `norm_scale`) whose undistortion is proportional to `q`. Throws
/// OutOfRange when no real distorted radius exists or q_z is zero.
DistortedPoint distort(const Vec3& q, double lambda, double norm_scale = 1.0);

/// Cayley-parameterized rotation about y with s = tan(theta / 2).
/// Cannot represent theta = 180 degrees.
Mat3 cayley_yaw(double s);

/// Unnormalized Cayley matrix (scale 1 + s^2 dropped), as used in the
/// polynomial constraints.
Mat3 cayley_yaw_unnormalized(double s);

ConstraintRows expand_constraints(const Correspondence& c, ExpansionMode mode);

/// Scale-fixes a homography: divide by H(2,2) when |H(2,2)| > 1e-12, otherwise
/// by the largest-magnitude entry. Returns the divisor used.
double scale_fix_divisor(const Mat3& H);

StitchModel compose_model(double s, double f1, double f2, double lambda1,
                          double lambda2, const GravityPrior& g1,
                          const GravityPrior& g2);

/// Pixel transfer error of `c` under `model`; +infinity when the mapped point
/// falls outside the distortable range.
double transfer_error(const StitchModel& model, const Correspondence& c,
                      TransferMode mode = TransferMode::kSymmetric);

/// Geodesic angle of a rotation (radians).
double rotation_angle(const Mat3& R);

Mat3 rotation_about_x(double angle);
Mat3 rotation_about_y(double angle);
Mat3 rotation_about_z(double angle);

}  // namespace gravpano
