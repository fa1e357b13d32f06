#include "triform/manifolds.hpp"

#include <cmath>
#include <string>

namespace triform {

const char* to_string(ManifoldTag tag) {
  switch (tag) {
    case ManifoldTag::CollocatedSet:
      return "CollocatedSet";
    case ManifoldTag::LineSetPunctured:
      return "LineSetPunctured";
  }
  return "CollocatedSet";
}

ManifoldPoint ManifoldPoint::collocated() {
  ManifoldPoint p;
  p.e = LinkState();
  p.normal_basis = normal_basis_collocated();
  p.tag = ManifoldTag::CollocatedSet;
  return p;
}

ManifoldPoint ManifoldPoint::line_set(const LinkState& e,
                                      double excision_radius) {
  if (!is_collinear(e)) {
    throw PreconditionError("ManifoldPoint::line_set: state is not collinear");
  }
  if (e.norm() < excision_radius) {
    throw PreconditionError(
        "ManifoldPoint::line_set: state lies inside the excised collocation "
        "ball (|e| = " +
        std::to_string(e.norm()) + ")");
  }
  ManifoldPoint p;
  p.e = e;
  p.normal_basis = normal_basis_line_set(e);
  p.tag = ManifoldTag::LineSetPunctured;
  return p;
}

Vec3 defining_function_line_set(const LinkState& e) {
  Vec3 f;
  f(0) = oriented_area2(e);
  f.tail<2>() = e.e1() + e.e2() + e.e3();
  return f;
}

Mat36 jacobian_defining_function(const LinkState& e) {
  const Mat2& J = rotation90();
  Mat36 m = Mat36::Zero();
  m.block<1, 2>(0, 0) = -(e.e2().transpose() * J);
  m.block<1, 2>(0, 2) = e.e1().transpose() * J;
  for (int k = 0; k < 3; ++k) {
    m.block<2, 2>(1, 2 * k) = Mat2::Identity();
  }
  return m;
}

const Mat64& collocated_normal_columns() {
  static const Mat64 B = [] {
    Mat64 b = Mat64::Zero();
    const Mat2 I = Mat2::Identity();
    b.block<2, 2>(0, 0) = -I;
    b.block<2, 2>(2, 0) = I;
    b.block<2, 2>(2, 2) = -I;
    b.block<2, 2>(4, 2) = I;
    return b;
  }();
  return B;
}

const Mat64& normal_basis_collocated() {
  // The collocated set is a point, so its normal complement within the link
  // space is the whole link space.
  return link_space_basis();
}

Vec6 line_normal_direction(const LinkState& e) {
  const Mat2& J = rotation90();
  Vec6 n;
  n << -(J * e.e2()), -(J * e.e3()), -(J * e.e1());
  return n;
}

Vec6 normal_basis_line_set(const LinkState& e) {
  const Vec6 n = line_normal_direction(e);
  const double norm = n.norm();
  if (norm < 1e-9) {
    throw DegenerateError(
        "normal_basis_line_set: direction degenerates near the origin "
        "(norm = " +
        std::to_string(norm) + ")");
  }
  return n / norm;
}

Vec6 line_orthogonal_normal(const LinkState& e) {
  const Mat2& J = rotation90();
  LinkState r(J * e.e2(), -(J * e.e1()), Vec2::Zero());
  const Vec6 n = r.projected().e;
  const double norm = n.norm();
  if (norm < 1e-9) {
    throw DegenerateError(
        "line_orthogonal_normal: direction degenerates near the origin");
  }
  return n / norm;
}

Eigen::MatrixXd gamma_quadratic_form(
    const LinkState& e, const Eigen::Matrix<double, 6, Eigen::Dynamic>& basis,
    const FormationSpec& spec) {
  const Mat6 A = jacobian_links(e, spec);
  const Mat6 S = A + A.transpose();
  return basis.transpose() * S * basis;
}

GammaReport gamma_general(const ManifoldPoint& point,
                          const FormationSpec& spec) {
  GammaReport report;
  report.point = point;
  report.gamma = gamma_quadratic_form(point.e, point.normal_basis, spec);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(report.gamma);
  report.eigenvalues = es.eigenvalues();
  report.min_eigenvalue = report.eigenvalues(0);
  report.positive_definite =
      report.min_eigenvalue > 1e-12 * std::abs(report.gamma.trace());
  return report;
}

Mat4 gamma_collocated_from_squares(double d1_sq, double d2_sq, double d3_sq) {
  const double diag1 = 2.0 * d1_sq + 4.0 * d2_sq;
  const double off = d1_sq - 3.0 * d2_sq - d3_sq;
  const double diag2 = 2.0 * d2_sq + 4.0 * d3_sq;
  Mat4 g = Mat4::Zero();
  const Mat2 I = Mat2::Identity();
  g.block<2, 2>(0, 0) = diag1 * I;
  g.block<2, 2>(0, 2) = off * I;
  g.block<2, 2>(2, 0) = off * I;
  g.block<2, 2>(2, 2) = diag2 * I;
  return g;
}

Mat4 gamma_collocated_closed(const FormationSpec& spec) {
  const Vec3 dsq = spec.squares();
  return gamma_collocated_from_squares(dsq(0), dsq(1), dsq(2));
}

std::pair<double, double> gamma_line_brackets(const LinkState& e,
                                              const FormationSpec& spec) {
  const PsiVector p = psi(e, spec);
  const double first = e.e2().dot(p(0) * e.e1()) + e.e3().dot(p(1) * e.e2()) +
                       e.e1().dot(p(2) * e.e3());
  const double second = p(0) * e.e2().squaredNorm() +
                        p(1) * e.e3().squaredNorm() +
                        p(2) * e.e1().squaredNorm();
  return {first, second};
}

namespace {

void require_collinear_equilibrium(const LinkState& e,
                                   const FormationSpec& spec,
                                   const char* where) {
  if (!is_collinear(e)) {
    throw PreconditionError(std::string(where) + ": state is not collinear");
  }
  if (e.norm() < 1e-9) {
    throw PreconditionError(std::string(where) + ": state is the origin");
  }
  const double residual = equilibrium_residual(e, spec);
  if (residual > 1e-8) {
    throw PreconditionError(std::string(where) +
                            ": equilibrium residual too large (" +
                            std::to_string(residual) + ")");
  }
}

}  // namespace

double gamma_line_closed(const LinkState& e, const FormationSpec& spec) {
  require_collinear_equilibrium(e, spec, "gamma_line_closed");
  const auto [first, second] = gamma_line_brackets(e, spec);
  return 2.0 * (first - second);
}

double gamma_line_product_form(const LinkState& e, const FormationSpec& spec) {
  require_collinear_equilibrium(e, spec, "gamma_line_product_form");
  const Vec3 dsq = spec.squares();
  const double scale = 1.0 + e.norm();
  const Vec2 blocks[3] = {e.e1(), e.e2(), e.e3()};
  for (int k = 0; k < 3; ++k) {
    if (blocks[k].norm() <= 1e-9 * scale) {
      const Vec2 next = blocks[(k + 1) % 3];
      return 2.0 * dsq(k) * next.squaredNorm();
    }
  }
  const double s = e.e1().squaredNorm();
  const double x = e.e1().dot(e.e2()) / s;
  const double psi1 = s - dsq(0);
  const double quad = (x + 0.5) * (x + 0.5) + 0.75;
  return 2.0 * s * (-psi1 / lambda_fn(x)) * quad * quad * quad /
         (x * x * (1.0 + x) * (1.0 + x));
}

double lambda_fn(double x) {
  if (x == 0.0 || x == -1.0) {
    throw DomainError("lambda_fn: pole at x = " + std::to_string(x));
  }
  return 1.0 + 1.0 / x - 1.0 / (1.0 + x);
}

}  // namespace triform
