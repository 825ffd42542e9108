#include <algorithm>
#include <cmath>
#include <limits>

#include "gravpano/errors.hpp"
#include "gravpano/polynomial.hpp"

namespace gravpano {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Newton steps that are kept only while they reduce |p|.
double polish(const UniPoly& p, double x, int steps) {
  auto [fx, dfx] = p.eval_with_derivative(x);
  for (int i = 0; i < steps; ++i) {
    if (dfx == 0.0 || fx == 0.0) break;
    const double xn = x - fx / dfx;
    const auto [fn, dfn] = p.eval_with_derivative(xn);
    if (!(std::abs(fn) <= std::abs(fx))) break;
    x = xn;
    fx = fn;
    dfx = dfn;
  }
  return x;
}

std::vector<double> finish(const UniPoly& p, std::vector<double> roots, int polish_steps) {
  for (double& r : roots) r = polish(p, r, polish_steps);
  return merge_clustered(std::move(roots));
}

}  // namespace

std::vector<double> solve_quadratic(const UniPoly& p) {
  const int d = p.degree();
  if (d < 0) throw InvalidInput("zero polynomial has no isolated roots");
  if (d > 2) throw InvalidInput("solve_quadratic expects degree <= 2");
  if (d == 0) return {};
  const double c = p.coeff(0);
  const double b = p.coeff(1);
  if (d == 1) return {-c / b};
  const double a = p.coeff(2);
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    // Tangency lost to rounding is still reported as a double root.
    if (disc > -1e-14 * std::max(b * b, std::abs(4.0 * a * c))) return {-b / (2.0 * a)};
    return {};
  }
  if (disc == 0.0) return {-b / (2.0 * a)};
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  std::vector<double> r;
  if (q != 0.0) {
    r = {q / a, c / q};
  } else {
    r = {0.0};
  }
  return merge_clustered(std::move(r), 0.0);
}

namespace {

// Real roots of the monic cubic x^3 + a x^2 + b x + c, unpolished.
std::vector<double> monic_cubic_roots(double a, double b, double c) {
  // x = y - a/3: y^3 + P y + Q = 0
  const double P = b - a * a / 3.0;
  const double Q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double shift = -a / 3.0;
  std::vector<double> roots;
  const double disc = Q * Q / 4.0 + P * P * P / 27.0;
  if (P == 0.0 && Q == 0.0) {
    roots = {shift};
  } else if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    const double u = std::cbrt(-Q / 2.0 + (Q < 0 ? sq : -sq));
    // The other cube root from u * v = -P / 3 avoids cancellation.
    const double v = u != 0.0 ? -P / (3.0 * u) : std::cbrt(-Q);
    roots = {u + v + shift};
  } else {
    const double m = 2.0 * std::sqrt(-P / 3.0);
    const double arg = std::clamp(3.0 * Q / (P * m), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) roots.push_back(m * std::cos(phi - 2.0 * kPi * k / 3.0) + shift);
  }
  return roots;
}

}  // namespace

std::vector<double> solve_cubic(const UniPoly& p) {
  const int d = p.degree();
  if (d < 0) throw InvalidInput("zero polynomial has no isolated roots");
  if (d <= 2) return solve_quadratic(p.trimmed());
  if (d > 3) throw InvalidInput("solve_cubic expects degree <= 3");
  const double a3 = p.coeff(3);
  return finish(p, monic_cubic_roots(p.coeff(2) / a3, p.coeff(1) / a3, p.coeff(0) / a3), 3);
}

std::vector<double> solve_quartic(const UniPoly& p) {
  const int d = p.degree();
  if (d < 0) throw InvalidInput("zero polynomial has no isolated roots");
  if (d <= 3) return solve_cubic(p.trimmed());
  if (d > 4) throw InvalidInput("solve_quartic expects degree <= 4");
  const double a4 = p.coeff(4);
  const double a = p.coeff(3) / a4;
  const double b = p.coeff(2) / a4;
  const double c = p.coeff(1) / a4;
  const double e = p.coeff(0) / a4;
  // x = y - a/4: y^4 + P y^2 + Q y + R = 0
  const double a2 = a * a;
  const double P = b - 3.0 * a2 / 8.0;
  const double Q = c - a * b / 2.0 + a2 * a / 8.0;
  const double R = e - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;
  const double shift = -a / 4.0;
  const double scale = std::max({std::abs(P), std::sqrt(std::abs(R)), 1e-300});

  std::vector<double> ys;
  const auto add_quadratic = [&](double B, double C) {
    // y^2 + B y + C = 0
    const double disc = B * B - 4.0 * C;
    if (disc < 0.0) {
      if (disc > -1e-12 * std::max(B * B, std::abs(4.0 * C))) ys.push_back(-B / 2.0);
      return;
    }
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (B + std::copysign(sq, B));
    if (q != 0.0) {
      ys.push_back(q);
      ys.push_back(C / q);
    } else {
      ys.push_back(0.0);
    }
  };

  if (std::abs(Q) <= 1e-14 * scale * std::sqrt(scale)) {
    // Biquadratic in z = y^2.
    const double disc = P * P - 4.0 * R;
    if (disc >= -1e-14 * P * P) {
      const double sq = std::sqrt(std::max(disc, 0.0));
      const double z1 = -0.5 * (P + std::copysign(sq, P));
      const double z2 = z1 != 0.0 ? R / z1 : 0.0;
      for (double z : {z1, z2}) {
        if (z >= 0.0) {
          ys.push_back(std::sqrt(z));
          ys.push_back(-std::sqrt(z));
        }
      }
    }
  } else {
    // Resolvent cubic m^3 + P m^2 + (P^2/4 - R) m - Q^2/8 = 0 has a positive root.
    const double rc = P * P / 4.0 - R;
    const double rd = -Q * Q / 8.0;
    auto res = monic_cubic_roots(P, rc, rd);
    double m = res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
    // Newton polish of the resolvent root on its own cubic.
    for (int it = 0; it < 3 && m > 0.0; ++it) {
      const double f = ((m + P) * m + rc) * m + rd;
      const double df = (3.0 * m + 2.0 * P) * m + rc;
      if (df == 0.0) break;
      const double mn = m - f / df;
      if (!(mn > 0.0)) break;
      m = mn;
    }
    if (m <= 0.0) m = std::numeric_limits<double>::min();
    const double sq = std::sqrt(2.0 * m);
    add_quadratic(-sq, P / 2.0 + m + Q / (2.0 * sq));
    add_quadratic(sq, P / 2.0 + m - Q / (2.0 * sq));
  }
  std::vector<double> roots;
  roots.reserve(ys.size());
  for (double y : ys) roots.push_back(y + shift);
  return finish(p, std::move(roots), 2);
}

double cauchy_bound(const UniPoly& p) {
  const int d = p.degree();
  if (d <= 0) return 0.0;
  const double lead = std::abs(p.coeff(d));
  double m = 0.0;
  for (int i = 0; i < d; ++i) m = std::max(m, std::abs(p.coeff(i)) / lead);
  return 1.0 + m;
}

namespace {

using Sequence = std::vector<UniPoly>;

void normalize(UniPoly& p) {
  const double n = p.norm_inf();
  if (n > 0.0) p *= 1.0 / n;
}

// Remainder of a / b for polynomials already trimmed.
UniPoly remainder(UniPoly a, const UniPoly& b) {
  const int db = b.size() - 1;
  const double lb = b.coeffs().back();
  auto& ac = a.coeffs();
  for (int k = a.size() - 1; k >= db; --k) {
    const double q = ac[k] / lb;
    for (int j = 0; j <= db; ++j) ac[k - db + j] -= q * b.coeffs()[j];
    ac[k] = 0.0;
  }
  ac.resize(std::max(db, 1));
  return a;
}

Sequence sturm_sequence(const UniPoly& p) {
  Sequence seq;
  UniPoly p0 = p.trimmed();
  normalize(p0);
  UniPoly p1 = p0.derivative().trim();
  normalize(p1);
  seq.push_back(p0);
  if (p1.size() == 0) return seq;
  seq.push_back(p1);
  while (seq.back().size() > 1) {
    UniPoly r = remainder(seq[seq.size() - 2], seq.back());
    // Near-zero remainder: the previous entry is (numerically) gcd(p, p').
    if (r.norm_inf() < 1e-12) break;
    r.trim();
    r *= -1.0;
    normalize(r);
    seq.push_back(r);
  }
  return seq;
}

int sign_changes(const Sequence& seq, double x) {
  int changes = 0;
  double prev = 0.0;
  for (const auto& q : seq) {
    const double v = q(x);
    if (v == 0.0) continue;
    if (prev != 0.0 && (v > 0.0) != (prev > 0.0)) ++changes;
    prev = v;
  }
  return changes;
}

// Refines the single distinct root in (lo, hi].
double refine_root(const UniPoly& p, const Sequence& seq, double lo, double hi, double tol) {
  double flo = p(lo);
  double fhi = p(hi);
  if (fhi == 0.0) return hi;
  if (flo != 0.0 && (flo > 0.0) != (fhi > 0.0)) {
    // Safeguarded Newton on a sign-changing bracket.
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
      const auto [fx, dfx] = p.eval_with_derivative(x);
      if (fx == 0.0) return x;
      if ((fx > 0.0) == (flo > 0.0)) {
        lo = x;
        flo = fx;
      } else {
        hi = x;
      }
      double xn = dfx != 0.0 ? x - fx / dfx : 0.5 * (lo + hi);
      if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
      if (std::abs(xn - x) < 0.25 * tol) return xn;
      x = xn;
    }
    return 0.5 * (lo + hi);
  }
  // Even multiplicity: p does not change sign, bisect on Sturm counts.
  const int v_hi = sign_changes(seq, hi);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (p(mid) == 0.0) return mid;
    if (sign_changes(seq, mid) - v_hi > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void isolate(const UniPoly& p, const Sequence& seq, double lo, double hi, int v_lo, int v_hi,
             double tol, int depth, std::vector<double>& out) {
  const int count = v_lo - v_hi;
  if (count <= 0) return;
  if (count == 1) {
    out.push_back(refine_root(p, seq, lo, hi, tol));
    return;
  }
  if (hi - lo <= tol || depth > 200) {
    out.push_back(0.5 * (lo + hi));
    return;
  }
  double mid = 0.5 * (lo + hi);
  if (p(mid) == 0.0) {
    // Split away from an exact root so counts stay well defined.
    out.push_back(mid);
    const double eps = std::max(tol, 1e-15 * std::abs(mid));
    const int v_l = sign_changes(seq, mid - eps);
    const int v_r = sign_changes(seq, mid + eps);
    isolate(p, seq, lo, mid - eps, v_lo, v_l, tol, depth + 1, out);
    isolate(p, seq, mid + eps, hi, v_r, v_hi, tol, depth + 1, out);
    return;
  }
  const int v_mid = sign_changes(seq, mid);
  isolate(p, seq, lo, mid, v_lo, v_mid, tol, depth + 1, out);
  isolate(p, seq, mid, hi, v_mid, v_hi, tol, depth + 1, out);
}

}  // namespace

int sturm_count(const UniPoly& p, double lo, double hi) {
  const Sequence seq = sturm_sequence(p);
  return sign_changes(seq, lo) - sign_changes(seq, hi);
}

std::vector<double> sturm_roots(const UniPoly& p, Interval bracket, double tol) {
  const int d = p.degree();
  if (d < 0) throw InvalidInput("zero polynomial has no isolated roots");
  if (d == 0) return {};
  const double bound = cauchy_bound(p);
  double lo = std::max(bracket.lo, -bound);
  double hi = std::min(bracket.hi, bound);
  if (!(lo < hi)) return {};
  const Sequence seq = sturm_sequence(p);
  std::vector<double> out;
  // The count covers (lo, hi]; a root sitting exactly on lo is added here.
  if (p(lo) == 0.0) {
    out.push_back(lo);
    lo = std::nextafter(lo, hi);
  }
  isolate(p, seq, lo, hi, sign_changes(seq, lo), sign_changes(seq, hi), tol, 0, out);
  return merge_clustered(std::move(out));
}

std::vector<double> sturm_roots(const UniPoly& p, double tol) {
  const double b = cauchy_bound(p);
  return sturm_roots(p, Interval{-b, b}, tol);
}

}  // namespace gravpano
