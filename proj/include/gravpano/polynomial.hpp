#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace gravpano {

/// Dense univariate polynomial with real coefficients in ascending degree.
class UniPoly {
 public:
  UniPoly() = default;
  UniPoly(std::initializer_list<double> coeffs) : c_(coeffs) {}
  explicit UniPoly(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

  static UniPoly constant(double c) { return UniPoly({c}); }
  static UniPoly monomial(int degree, double c = 1.0);

  const std::vector<double>& coeffs() const { return c_; }
  std::vector<double>& coeffs() { return c_; }
  double coeff(int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : 0.0; }
  int size() const { return static_cast<int>(c_.size()); }

  /// Degree after ignoring trailing coefficients below 1e-13 * ||c||_inf;
  /// -1 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return degree() < 0; }
  double norm_inf() const;
  double leading() const;

  /// Drops trailing near-zero coefficients (see degree()).
  UniPoly& trim();
  UniPoly trimmed() const;

  double operator()(double x) const;
  /// Value and first derivative at x.
  std::pair<double, double> eval_with_derivative(double x) const;
  UniPoly derivative() const;

  UniPoly& operator+=(const UniPoly& o);
  UniPoly& operator-=(const UniPoly& o);
  UniPoly& operator*=(double k);

  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  friend UniPoly operator-(UniPoly a, const UniPoly& b) { return a -= b; }
  friend UniPoly operator*(UniPoly a, double k) { return a *= k; }
  friend UniPoly operator*(double k, UniPoly a) { return a *= k; }
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b);

 private:
  std::vector<double> c_;
};

/// Square matrix (n = 2 or 3) of polynomials in a hidden variable.
class PolyMat {
 public:
  explicit PolyMat(int n);

  int n() const { return n_; }
  UniPoly& at(int r, int c) { return e_[r * n_ + c]; }
  const UniPoly& at(int r, int c) const { return e_[r * n_ + c]; }
  Eigen::MatrixXd evaluate(double s) const;
  int max_entry_degree() const;

 private:
  int n_;
  std::vector<UniPoly> e_;
};

struct Interval {
  double lo;
  double hi;
};

/// Real roots of a polynomial of degree <= 2, ascending, repeated roots
/// collapsed. Throws InvalidInput for the zero polynomial or degree > 2.
std::vector<double> solve_quadratic(const UniPoly& p);

/// Real roots of a polynomial of degree <= 3 (Cardano / trigonometric form
/// followed by Newton polish).
std::vector<double> solve_cubic(const UniPoly& p);

/// Real roots of a polynomial of degree <= 4 via the resolvent cubic,
/// each root polished by Newton steps.
std::vector<double> solve_quartic(const UniPoly& p);

/// Cauchy bound on the magnitude of every root.
double cauchy_bound(const UniPoly& p);

/// Distinct real roots in `bracket`, isolated by Sturm sign-change counts and
/// refined by safeguarded Newton/bisection to |delta| < tol.
std::vector<double> sturm_roots(const UniPoly& p, Interval bracket, double tol = 1e-12);
std::vector<double> sturm_roots(const UniPoly& p, double tol = 1e-12);

/// Number of distinct real roots in (lo, hi].
int sturm_count(const UniPoly& p, double lo, double hi);

/// Exact cofactor-expansion determinant (n = 2 or 3).
UniPoly polymat_det(const PolyMat& M);

/// Quotient of p / (1 + s^2). Throws NotDivisible when the remainder exceeds
/// 1e-8 * ||p||_inf.
UniPoly deflate_one_plus_s2(const UniPoly& p);

struct NullVector {
  Eigen::VectorXd v;
  // M(s0) vanished entirely: v is an arbitrary unit vector.
  bool rank0 = false;
};

/// Unit right null vector of M(s0), last component made positive when
/// nonzero. Throws NoNullspace when the smallest singular value exceeds
/// 1e-6 of the largest.
NullVector polymat_nullvector(const PolyMat& M, double s0);

/// Merges sorted roots closer than `tol` into one representative.
std::vector<double> merge_clustered(std::vector<double> roots, double tol = 1e-8);

}  // namespace gravpano
