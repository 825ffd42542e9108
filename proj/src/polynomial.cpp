#include "gravpano/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "gravpano/errors.hpp"

namespace gravpano {

namespace {
constexpr double kTrimRel = 1e-13;
}

UniPoly UniPoly::monomial(int degree, double c) {
  std::vector<double> v(static_cast<std::size_t>(degree) + 1, 0.0);
  v.back() = c;
  return UniPoly(std::move(v));
}

double UniPoly::norm_inf() const {
  double m = 0.0;
  for (double x : c_) m = std::max(m, std::abs(x));
  return m;
}

int UniPoly::degree() const {
  const double thr = kTrimRel * norm_inf();
  for (int i = size() - 1; i >= 0; --i) {
    if (std::abs(c_[i]) > thr) return i;
  }
  return -1;
}

double UniPoly::leading() const {
  const int d = degree();
  return d < 0 ? 0.0 : c_[d];
}

UniPoly& UniPoly::trim() {
  c_.resize(static_cast<std::size_t>(degree() + 1));
  return *this;
}

UniPoly UniPoly::trimmed() const {
  UniPoly out(*this);
  return out.trim();
}

double UniPoly::operator()(double x) const {
  double acc = 0.0;
  for (int i = size() - 1; i >= 0; --i) acc = acc * x + c_[i];
  return acc;
}

std::pair<double, double> UniPoly::eval_with_derivative(double x) const {
  double p = 0.0;
  double dp = 0.0;
  for (int i = size() - 1; i >= 0; --i) {
    dp = dp * x + p;
    p = p * x + c_[i];
  }
  return {p, dp};
}

UniPoly UniPoly::derivative() const {
  if (size() <= 1) return UniPoly({0.0});
  std::vector<double> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
  return UniPoly(std::move(d));
}

UniPoly& UniPoly::operator+=(const UniPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

UniPoly& UniPoly::operator-=(const UniPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

UniPoly& UniPoly::operator*=(double k) {
  for (double& x : c_) x *= k;
  return *this;
}

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
  if (a.c_.empty() || b.c_.empty()) return UniPoly({0.0});
  std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
  }
  return UniPoly(std::move(r));
}

PolyMat::PolyMat(int n) : n_(n), e_(static_cast<std::size_t>(n * n)) {
  if (n != 2 && n != 3) throw InvalidInput("PolyMat dimension must be 2 or 3");
}

Eigen::MatrixXd PolyMat::evaluate(double s) const {
  Eigen::MatrixXd M(n_, n_);
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) M(r, c) = at(r, c)(s);
  return M;
}

int PolyMat::max_entry_degree() const {
  int d = -1;
  for (const auto& p : e_) d = std::max(d, p.degree());
  return d;
}

UniPoly polymat_det(const PolyMat& M) {
  if (M.n() == 2) {
    return M.at(0, 0) * M.at(1, 1) - M.at(0, 1) * M.at(1, 0);
  }
  const auto minor = [&](int r0, int r1, int c0, int c1) {
    return M.at(r0, c0) * M.at(r1, c1) - M.at(r0, c1) * M.at(r1, c0);
  };
  return M.at(0, 0) * minor(1, 2, 1, 2) - M.at(0, 1) * minor(1, 2, 0, 2) +
         M.at(0, 2) * minor(1, 2, 0, 1);
}

UniPoly deflate_one_plus_s2(const UniPoly& p) {
  const int n = p.size() - 1;
  if (n < 2) throw NotDivisible("polynomial of degree < 2 is not divisible by 1 + s^2");
  // p = (s^2 + 1) q + r1 s + r0  =>  q[k-2] = p[k] - q[k].
  std::vector<double> q(static_cast<std::size_t>(n - 1), 0.0);
  for (int k = n; k >= 2; --k) {
    const double qk = k <= n - 2 ? q[k] : 0.0;
    q[k - 2] = p.coeff(k) - qk;
  }
  const double r1 = p.coeff(1) - (n - 2 >= 1 ? q[1] : 0.0);
  const double r0 = p.coeff(0) - q[0];
  const double scale = p.norm_inf();
  if (std::max(std::abs(r0), std::abs(r1)) > 1e-8 * scale) {
    throw NotDivisible("remainder of division by 1 + s^2 exceeds tolerance");
  }
  return UniPoly(std::move(q));
}

NullVector polymat_nullvector(const PolyMat& M, double s0) {
  const Eigen::MatrixXd A = M.evaluate(s0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  NullVector out;
  out.v = svd.matrixV().col(A.cols() - 1);
  if (sv(0) == 0.0) {
    out.rank0 = true;
  } else if (sv(sv.size() - 1) >= 1e-6 * sv(0)) {
    throw NoNullspace("matrix is numerically full rank at the requested point");
  }
  if (out.v(out.v.size() - 1) < 0.0) out.v = -out.v;
  return out;
}

std::vector<double> merge_clustered(std::vector<double> roots, double tol) {
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots) {
    if (!out.empty() && std::abs(r - out.back()) <= tol * std::max(1.0, std::abs(r))) continue;
    out.push_back(r);
  }
  return out;
}

}  // namespace gravpano
