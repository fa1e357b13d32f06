#include "triform/equilibria.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace triform {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Coefficients of the ratio polynomial P(x) whose real roots (with positive
// s(x)) are the distinct collinear branches. Derived by eliminating s from
// the два linear-in-s equilibrium relations:
//   g1(x,s) = s (1 - x^3) - A + B x
//   g2(x,s) = s (1 + (1+x)^3) - A - (1+x) C
// with A = d1^2, B = d2^2, C = d3^2.
struct RatioPolynomial {
  double A, B, C;
  std::array<double, 5> c;  // c[k] multiplies x^k

  explicit RatioPolynomial(const Vec3& dsq)
      : A(dsq(0)), B(dsq(1)), C(dsq(2)) {
    c[4] = C - B;
    c[3] = 2.0 * A - 3.0 * B + C;
    c[2] = 3.0 * (A - B);
    c[1] = 3.0 * A - 2.0 * B - C;
    c[0] = A - C;
  }

  double eval(double x) const {
    return (((c[4] * x + c[3]) * x + c[2]) * x + c[1]) * x + c[0];
  }
  double deriv(double x) const {
    return ((4.0 * c[4] * x + 3.0 * c[3]) * x + 2.0 * c[2]) * x + c[1];
  }
  // w^4 P(1/w): same roots in the reciprocal variable.
  double eval_reciprocal(double w) const {
    return (((c[0] * w + c[1]) * w + c[2]) * w + c[3]) * w + c[4];
  }
  double deriv_reciprocal(double w) const {
    return ((4.0 * c[0] * w + 3.0 * c[1]) * w + 2.0 * c[2]) * w + c[3];
  }

  bool identically_zero() const {
    double m = 0.0;
    for (double ck : c) m = std::max(m, std::abs(ck));
    return m <= 1e-12 * (A + B + C);
  }

  double g1(double x, double s) const { return s * (1.0 - x * x * x) - A + B * x; }
  double g2(double x, double s) const {
    const double y = 1.0 + x;
    return s * (1.0 + y * y * y) - A - y * C;
  }

  // s from whichever linear relation is better conditioned at this x.
  double closed_form_s(double x) const {
    const double den1 = 1.0 - x * x * x;
    const double y = 1.0 + x;
    const double den2 = 1.0 + y * y * y;
    if (std::abs(den1) >= std::abs(den2)) return (A - B * x) / den1;
    return (A + y * C) / den2;
  }

  // One 2D Newton pass on (g1, g2); returns false when the local Jacobian is
  // singular.
  bool newton_polish(double& x, double& s, int iterations = 6) const {
    for (int i = 0; i < iterations; ++i) {
      const double y = 1.0 + x;
      const double f1 = g1(x, s), f2 = g2(x, s);
      const double j11 = -3.0 * s * x * x + B, j12 = 1.0 - x * x * x;
      const double j21 = 3.0 * s * y * y - C, j22 = 1.0 + y * y * y;
      const double det = j11 * j22 - j12 * j21;
      if (std::abs(det) < 1e-300) return false;
      const double dx = (f1 * j22 - f2 * j12) / det;
      const double ds = (j11 * f2 - j21 * f1) / det;
      x -= dx;
      s -= ds;
      if (std::abs(dx) <= 1e-16 * (1.0 + std::abs(x)) &&
          std::abs(ds) <= 1e-16 * (1.0 + std::abs(s))) {
        break;
      }
    }
    return true;
  }
};

template <typename F, typename DF>
double bisect_then_newton(double lo, double hi, double flo, const F& f,
                          const DF& df) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((flo > 0.0) == (fm > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * (std::abs(lo) + std::abs(hi))) break;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 12; ++i) {
    const double d = df(x);
    if (d == 0.0) break;
    const double step = f(x) / d;
    const double next = x - step;
    if (next < lo || next > hi) break;
    x = next;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(x))) break;
  }
  return x;
}

// Grid dense towards both interval ends, where the parameterization
// degenerates.
std::vector<double> ratio_scan_grid() {
  std::vector<double> xs;
  const int n = 700;
  for (int i = 0; i <= n; ++i) {
    const double u = -7.0 + (1.0 + 7.0) * i / n;  // 1e-7 .. 10
    xs.push_back(std::pow(10.0, u));              // (0, 10]
    xs.push_back(-std::pow(10.0, u));             // [-10, 0), dense near 0
  }
  for (int i = 0; i <= n; ++i) {
    const double v = -7.0 + (std::log10(9.0) + 7.0) * i / n;
    xs.push_back(-1.0 - std::pow(10.0, v));  // (-10, -1), dense near -1
    const double w = -7.0 + 7.0 * i / n;
    xs.push_back(-1.0 + std::pow(10.0, w));  // (-1, 0), dense near -1
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

struct RatioRoot {
  double x, s;
};

void collect_bracketed_roots(const RatioPolynomial& poly,
                             const std::vector<double>& grid, bool reciprocal,
                             std::vector<RatioRoot>& out,
                             std::vector<std::string>& warnings) {
  const auto f = [&](double t) {
    return reciprocal ? poly.eval_reciprocal(t) : poly.eval(t);
  };
  const auto df = [&](double t) {
    return reciprocal ? poly.deriv_reciprocal(t) : poly.deriv(t);
  };
  double prev_t = grid.front();
  double prev_f = f(prev_t);
  for (size_t i = 1; i < grid.size(); ++i) {
    const double t = grid[i];
    const double ft = f(t);
    if (prev_f == 0.0 || (prev_f < 0.0) != (ft < 0.0)) {
      const double root_t = prev_f == 0.0
                                ? prev_t
                                : bisect_then_newton(prev_t, t, prev_f, f, df);
      const double x = reciprocal ? 1.0 / root_t : root_t;
      double s = poly.closed_form_s(x);
      double xr = x;
      if (s > 0.0 && poly.newton_polish(xr, s)) {
        const double res_scale =
            (poly.A + poly.B + poly.C) * (1.0 + std::abs(xr)) *
                (1.0 + std::abs(xr)) * (1.0 + std::abs(xr)) +
            1.0;
        const double res = std::abs(poly.g1(xr, s)) + std::abs(poly.g2(xr, s));
        if (res <= 1e-11 * res_scale && s > 0.0) {
          out.push_back({xr, s});
        } else {
          warnings.push_back(
              "root refinement did not converge near x = " + std::to_string(x) +
              " (residual " + std::to_string(res) + ")");
        }
      }
    }
    prev_t = t;
    prev_f = ft;
  }
}

Eigen::Vector4cd spectrum(const LinkState& e, const FormationSpec& spec) {
  return link_space_jacobian_spectrum(e, spec);
}

EquilibriumRecord make_distinct_record(double x, double s,
                                       const FormationSpec& spec) {
  EquilibriumRecord r;
  r.kind = EquilibriumKind::CollinearDistinct;
  r.x = x;
  r.s = s;
  r.e = collinear_state_from_ratio(x, s);
  r.psi_values = psi(r.e, spec);
  r.psi_sum = r.psi_values.sum();
  r.gamma = gamma_line_closed(r.e, spec);
  r.link_jacobian_eigenvalues = spectrum(r.e, spec);
  return r;
}

EquilibriumRecord make_pair_record(int vanishing_link,
                                   const FormationSpec& spec) {
  const Vec3 d = spec.lengths();
  EquilibriumRecord r;
  r.kind = EquilibriumKind::CollinearCollocatedPair;
  const Vec2 ux(1.0, 0.0);
  switch (vanishing_link) {
    case 0:  // e1 = 0, needs d2 = d3; oriented with e2 on +x
      r.e = LinkState(Vec2::Zero(), d(1) * ux, -d(1) * ux);
      r.x = kNaN;
      r.s = 0.0;
      break;
    case 1:  // e2 = 0, needs d1 = d3
      r.e = LinkState(d(0) * ux, Vec2::Zero(), -d(0) * ux);
      r.x = 0.0;
      r.s = d(0) * d(0);
      break;
    default:  // e3 = 0, needs d1 = d2
      r.e = LinkState(d(0) * ux, -d(0) * ux, Vec2::Zero());
      r.x = -1.0;
      r.s = d(0) * d(0);
      break;
  }
  r.psi_values = psi(r.e, spec);
  r.psi_sum = r.psi_values.sum();
  r.gamma = gamma_line_closed(r.e, spec);
  r.link_jacobian_eigenvalues = spectrum(r.e, spec);
  return r;
}

EquilibriumRecord make_origin_record(const FormationSpec& spec) {
  EquilibriumRecord r;
  r.kind = EquilibriumKind::Origin;
  r.e = LinkState();
  r.x = kNaN;
  r.s = 0.0;
  r.psi_values = psi(r.e, spec);
  r.psi_sum = r.psi_values.sum();
  r.gamma_matrix = gamma_collocated_closed(spec);
  Eigen::SelfAdjointEigenSolver<Mat4> es(*r.gamma_matrix);
  r.gamma = es.eigenvalues()(0);
  r.link_jacobian_eigenvalues = spectrum(r.e, spec);
  return r;
}

}  // namespace

const char* to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::Target:
      return "Target";
    case EquilibriumKind::CollinearCollocatedPair:
      return "CollinearCollocatedPair";
    case EquilibriumKind::CollinearDistinct:
      return "CollinearDistinct";
    case EquilibriumKind::Origin:
      return "Origin";
  }
  return "Origin";
}

LinkState collinear_state_from_ratio(double x, double s) {
  const double r = std::sqrt(s);
  const Vec2 e1(r, 0.0);
  return LinkState(e1, x * e1, -(1.0 + x) * e1);
}

EquilibriumCatalog collinear_equilibria(const FormationSpec& spec) {
  EquilibriumCatalog catalog;
  const RatioPolynomial poly(spec.squares());
  const Vec3 d = spec.lengths();

  catalog.records.push_back(make_origin_record(spec));

  const auto nearly_equal = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * (a + b);
  };
  if (nearly_equal(d(1), d(2))) catalog.records.push_back(make_pair_record(0, spec));
  if (nearly_equal(d(0), d(2))) catalog.records.push_back(make_pair_record(1, spec));
  if (nearly_equal(d(0), d(1))) catalog.records.push_back(make_pair_record(2, spec));

  std::vector<RatioRoot> roots;
  if (poly.identically_zero()) {
    // Every ratio solves the system: the distinct branches form a
    // one-parameter family. Report the symmetric representatives.
    catalog.continuum_family = true;
    for (double x : {-2.0, -0.5, 1.0}) {
      roots.push_back({x, poly.closed_form_s(x)});
    }
  } else {
    static const std::vector<double> x_grid = ratio_scan_grid();
    collect_bracketed_roots(poly, x_grid, false, roots, catalog.warnings);

    // Reciprocal scan: distinct branches with |x| > 10 exist whenever two
    // distances are close (x ~ d1^2/(d2^2-d3^2)); cover them via w = 1/x.
    std::vector<double> w_grid;
    const int nw = 2000;
    for (int i = 0; i <= nw; ++i) {
      const double w = 1e-9 + (0.1 - 1e-9) * i / nw;
      w_grid.push_back(w);
      w_grid.push_back(-w);
    }
    std::sort(w_grid.begin(), w_grid.end());
    std::vector<double> w_pos(w_grid.begin() + nw + 1, w_grid.end());
    std::vector<double> w_neg(w_grid.begin(), w_grid.begin() + nw + 1);
    collect_bracketed_roots(poly, w_pos, true, roots, catalog.warnings);
    collect_bracketed_roots(poly, w_neg, true, roots, catalog.warnings);
  }

  std::sort(roots.begin(), roots.end(),
            [](const RatioRoot& a, const RatioRoot& b) { return a.x < b.x; });
  std::vector<RatioRoot> unique_roots;
  for (const RatioRoot& r : roots) {
    if (r.s <= 1e-14 * (d(0) + d(1) + d(2)) * (d(0) + d(1) + d(2))) continue;
    if (std::abs(r.x) < 1e-7 || std::abs(1.0 + r.x) < 1e-7) continue;
    if (!unique_roots.empty() &&
        std::abs(r.x - unique_roots.back().x) <=
            1e-8 * (1.0 + std::abs(r.x))) {
      continue;
    }
    unique_roots.push_back(r);
  }

  for (const RatioRoot& r : unique_roots) {
    EquilibriumRecord rec = make_distinct_record(r.x, r.s, spec);
    const double res = equilibrium_residual(rec.e, spec);
    const double scale = 1.0 + std::pow(rec.e.norm(), 3);
    if (res > 1e-10 * scale) {
      catalog.warnings.push_back("record at x = " + std::to_string(r.x) +
                                 " exceeds the equilibrium residual budget (" +
                                 std::to_string(res) + ")");
    }
    catalog.records.push_back(std::move(rec));
  }
  return catalog;
}

std::vector<EquilibriumRecord> target_equilibria(const FormationSpec& spec) {
  const double d1 = spec.d1, d2 = spec.d2, d3 = spec.d3;
  const double e2x = (d3 * d3 - d2 * d2 - d1 * d1) / (2.0 * d1);
  const double e2y = std::sqrt(std::max(d2 * d2 - e2x * e2x, 0.0));

  std::vector<EquilibriumRecord> out;
  for (double sign : {+1.0, -1.0}) {
    EquilibriumRecord r;
    r.kind = EquilibriumKind::Target;
    const Vec2 e1(d1, 0.0);
    const Vec2 e2(e2x, sign * e2y);
    r.e = LinkState(e1, e2, -(e1 + e2));
    r.x = kNaN;
    r.s = d1 * d1;
    r.psi_values = psi(r.e, spec);
    r.psi_sum = r.psi_values.sum();
    r.gamma = kNaN;
    r.link_jacobian_eigenvalues = spectrum(r.e, spec);
    out.push_back(std::move(r));
  }
  return out;
}

PsiSumReport verify_psi_sum_negative(
    const std::vector<EquilibriumRecord>& records) {
  PsiSumReport report;
  report.min_margin = std::numeric_limits<double>::infinity();
  std::string violators;
  for (size_t i = 0; i < records.size(); ++i) {
    const EquilibriumRecord& r = records[i];
    if (!r.collinear_family()) continue;
    ++report.checked;
    report.min_margin = std::min(report.min_margin, -r.psi_sum);
    if (!(r.psi_sum < 0.0)) {
      violators += " record[" + std::to_string(i) +
                   "] kind=" + to_string(r.kind) +
                   " psi_sum=" + std::to_string(r.psi_sum);
    }
  }
  if (!violators.empty()) {
    throw VerificationError("psi-sum negativity violated:" + violators);
  }
  if (report.checked == 0) report.min_margin = 0.0;
  return report;
}

double rotation_orbit_distance(const LinkState& e, const LinkState& reference) {
  // Align the reference with the optimal rotation first and subtract
  // directly; the squared-norm identity loses all accuracy below
  // sqrt(eps) * scale.
  const Mat2& J = rotation90();
  double dot_direct = e.e.dot(reference.e);
  double dot_rotated = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Vec2 ek = e.e.segment<2>(2 * k);
    const Vec2 rk = reference.e.segment<2>(2 * k);
    dot_rotated += ek.dot(-(J * rk));
  }
  const double h = std::hypot(dot_direct, dot_rotated);
  if (h < 1e-300) {
    return std::sqrt(e.e.squaredNorm() + reference.e.squaredNorm());
  }
  const double c = dot_direct / h;
  const double s = dot_rotated / h;
  Vec6 aligned;
  for (int k = 0; k < 3; ++k) {
    const Vec2 rk = reference.e.segment<2>(2 * k);
    aligned.segment<2>(2 * k) = c * rk + s * (-(J * rk));
  }
  return (e.e - aligned).norm();
}

double min_distance_to_records(const LinkState& e,
                               const std::vector<EquilibriumRecord>& records) {
  double best = std::numeric_limits<double>::infinity();
  for (const EquilibriumRecord& r : records) {
    best = std::min(best, rotation_orbit_distance(e, r.e));
  }
  return best;
}

}  // namespace triform
