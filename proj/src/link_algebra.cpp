#include "triform/link_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace triform {

const Mat2& rotation90() {
  static const Mat2 J = (Mat2() << 0.0, 1.0, -1.0, 0.0).finished();
  return J;
}

FormationSpec::FormationSpec(double d1_, double d2_, double d3_)
    : d1(d1_), d2(d2_), d3(d3_) {
  if (!(d1 > 0.0) || !(d2 > 0.0) || !(d3 > 0.0)) {
    throw std::invalid_argument("FormationSpec: distances must be positive");
  }
  if (!(d1 < d2 + d3) || !(d2 < d1 + d3) || !(d3 < d1 + d2)) {
    throw std::invalid_argument(
        "FormationSpec: distances (" + std::to_string(d1) + ", " +
        std::to_string(d2) + ", " + std::to_string(d3) +
        ") violate the strict triangle inequalities");
  }
}

double LinkState::cycle_residual() const {
  return (e1() + e2() + e3()).norm();
}

LinkState LinkState::projected() const {
  const Vec2 m = (e1() + e2() + e3()) / 3.0;
  return LinkState(e1() - m, e2() - m, e3() - m);
}

const Mat6& incidence_matrix() {
  static const Mat6 H = [] {
    const Mat2 I = Mat2::Identity();
    const Mat2 O = Mat2::Zero();
    Mat6 m;
    m << -I, I, O,  //
        O, -I, I,   //
        I, O, -I;
    return m;
  }();
  return H;
}

LinkState links_from_positions(const PositionState& z) {
  return LinkState(z.z2() - z.z1(), z.z3() - z.z2(), z.z1() - z.z3());
}

PsiVector psi(const LinkState& e, const FormationSpec& spec) {
  PsiVector p;
  p << e.e1().squaredNorm() - spec.d1 * spec.d1,
      e.e2().squaredNorm() - spec.d2 * spec.d2,
      e.e3().squaredNorm() - spec.d3 * spec.d3;
  return p;
}

Mat36 rigidity_matrix(const LinkState& e) {
  Mat36 r = Mat36::Zero();
  const Mat6& H = incidence_matrix();
  for (int k = 0; k < 3; ++k) {
    const Vec2 ek = e.e.segment<2>(2 * k);
    r.row(k) = ek.transpose() * H.block<2, 6>(2 * k, 0);
  }
  return r;
}

Mat6 jacobian_links(const LinkState& e, const FormationSpec& spec) {
  const PsiVector p = psi(e, spec);
  Mat6 theta = Mat6::Zero();
  for (int k = 0; k < 3; ++k) {
    const Vec2 ek = e.e.segment<2>(2 * k);
    theta.block<2, 2>(2 * k, 2 * k) =
        p(k) * Mat2::Identity() + 2.0 * ek * ek.transpose();
  }
  return incidence_matrix() * theta;
}

double oriented_area2(const LinkState& e) {
  return e.e1().dot(rotation90() * e.e2());
}

bool is_collinear(const LinkState& e, double tol) {
  const double scale = e.e1().norm() * e.e2().norm() + 1.0;
  return std::abs(oriented_area2(e)) <= tol * scale;
}

const Mat64& link_space_basis() {
  static const Mat64 Q = [] {
    // Columns (-I,I,0) and (0,-I,I) stacked blockwise span the link space;
    // orthonormalize them.
    Mat64 b = Mat64::Zero();
    b(0, 0) = -1.0;
    b(2, 0) = 1.0;
    b(1, 1) = -1.0;
    b(3, 1) = 1.0;
    b(2, 2) = -1.0;
    b(4, 2) = 1.0;
    b(3, 3) = -1.0;
    b(5, 3) = 1.0;
    Eigen::HouseholderQR<Mat64> qr(b);
    Mat64 q = qr.householderQ() * Mat64::Identity();
    return q;
  }();
  return Q;
}

Eigen::Vector4cd link_space_jacobian_spectrum(const LinkState& e,
                                              const FormationSpec& spec) {
  const Mat64& Q = link_space_basis();
  const Mat4 restricted = Q.transpose() * jacobian_links(e, spec) * Q;
  Eigen::EigenSolver<Mat4> es(restricted);
  Eigen::Vector4cd ev = es.eigenvalues();
  std::sort(ev.data(), ev.data() + 4,
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (a.real() != b.real()) return a.real() > b.real();
              return a.imag() > b.imag();
            });
  return ev;
}

}  // namespace triform
