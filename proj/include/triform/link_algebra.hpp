#pragma once

// Link-space algebra of the three-robot cyclic sensing graph: the constant
// incidence matrix, position/link conversions, squared-length errors,
// rigidity matrix and the Jacobian of the closed-loop link dynamics.

#include <Eigen/Dense>

#include "triform/errors.hpp"

namespace triform {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat36 = Eigen::Matrix<double, 3, 6>;
using Mat64 = Eigen::Matrix<double, 6, 4>;

/// Tolerance on ||e1+e2+e3|| for a vector to count as a member of the link
/// space. Integrator drift stays well below this.
inline constexpr double kCycleTol = 1e-9;

/// Scale-aware collinearity threshold: |e1'Je2| <= tol*(|e1||e2|+1).
/// Classification only; never used inside the dynamics.
inline constexpr double kCollinearTol = 1e-9;

/// Planar 90-degree rotation J = [[0,1],[-1,0]]. Shared by all code so the
/// orientation of e1'Je2 (twice the signed triangle area) is consistent.
const Mat2& rotation90();

/// Distance constraints (d1,d2,d3) of the target triangle.
/// Throws std::invalid_argument unless all positive and the strict triangle
/// inequalities hold.
struct FormationSpec {
  double d1, d2, d3;

  FormationSpec(double d1_, double d2_, double d3_);

  Vec3 lengths() const { return {d1, d2, d3}; }
  Vec3 squares() const { return {d1 * d1, d2 * d2, d3 * d3}; }
  double perimeter() const { return d1 + d2 + d3; }
};

/// Stacked robot positions z = (z1,z2,z3) in the plane.
struct PositionState {
  Vec6 z = Vec6::Zero();

  PositionState() = default;
  explicit PositionState(const Vec6& v) : z(v) {}
  PositionState(const Vec2& z1, const Vec2& z2, const Vec2& z3) {
    z << z1, z2, z3;
  }

  Vec2 z1() const { return z.segment<2>(0); }
  Vec2 z2() const { return z.segment<2>(2); }
  Vec2 z3() const { return z.segment<2>(4); }
};

/// Stacked links e = (e1,e2,e3); members of the link space satisfy
/// e1+e2+e3 = 0 up to kCycleTol.
struct LinkState {
  Vec6 e = Vec6::Zero();

  LinkState() = default;
  explicit LinkState(const Vec6& v) : e(v) {}
  LinkState(const Vec2& e1, const Vec2& e2, const Vec2& e3) {
    e << e1, e2, e3;
  }

  Vec2 e1() const { return e.segment<2>(0); }
  Vec2 e2() const { return e.segment<2>(2); }
  Vec2 e3() const { return e.segment<2>(4); }

  double norm() const { return e.norm(); }

  /// ||e1+e2+e3||
  double cycle_residual() const;

  bool in_link_space(double tol = kCycleTol) const {
    return cycle_residual() <= tol;
  }

  /// Orthogonal projection onto the link space (subtracts the block mean).
  LinkState projected() const;
};

using PsiVector = Vec3;

/// The 6x6 block circulant incidence matrix H with block rows
/// [-I I 0; 0 -I I; I 0 -I]; rank 4, kernel spanned by (c,c,c).
const Mat6& incidence_matrix();

/// e = H z. Computed blockwise; the cycle sum vanishes to round-off.
LinkState links_from_positions(const PositionState& z);

/// psi_i = |e_i|^2 - d_i^2.
PsiVector psi(const LinkState& e, const FormationSpec& spec);

/// Rigidity matrix R(e) = diag(e_i)^T H; row k is e_k^T times block row k of
/// H. Rank 3 exactly on non-collinear link states.
Mat36 rigidity_matrix(const LinkState& e);

/// Jacobian of the closed-loop link field: H * blockdiag(Theta_i) with
/// Theta_i = psi_i I + 2 e_i e_i^T. At e = 0 this is H * diag(-d_i^2 I).
Mat6 jacobian_links(const LinkState& e, const FormationSpec& spec);

/// e1'Je2 — twice the signed area of the triangle spanned by the links.
double oriented_area2(const LinkState& e);

bool is_collinear(const LinkState& e, double tol = kCollinearTol);

/// Orthonormal columns spanning the link space {e : e1+e2+e3 = 0}.
const Mat64& link_space_basis();

/// Eigenvalues of the link-field Jacobian restricted to the link space
/// (Q^T A Q with Q = link_space_basis()), sorted by descending real part.
Eigen::Vector4cd link_space_jacobian_spectrum(const LinkState& e,
                                              const FormationSpec& spec);

}  // namespace triform
