#pragma once

// Geometry of the invariant sets of the link dynamics: the collocated set
// (the origin of the link space) and the punctured line set of collinear
// links. Provides defining functions, normal directions, and the symmetrized
// Jacobian quadratic forms ("Gamma") whose positive definiteness certifies
// that the field points outward on small tubular neighbourhoods.

#include <utility>

#include "triform/dynamics.hpp"
#include "triform/link_algebra.hpp"

namespace triform {

/// Radius of the collocation neighbourhood excised from the line set.
inline constexpr double kDefaultExcisionRadius = 1e-3;

enum class ManifoldTag { CollocatedSet, LineSetPunctured };

const char* to_string(ManifoldTag tag);

/// A point on an invariant manifold with an orthonormal basis of probe
/// directions spanning its normal complement within the link space.
struct ManifoldPoint {
  LinkState e;
  Eigen::Matrix<double, 6, Eigen::Dynamic> normal_basis;
  ManifoldTag tag = ManifoldTag::CollocatedSet;

  /// The origin of the link space; the normal complement is the whole
  /// 4-dimensional link space.
  static ManifoldPoint collocated();

  /// A collinear state outside the excised collocation ball, carrying the
  /// unit line normal. Throws PreconditionError if e is not collinear or is
  /// inside the excision radius.
  static ManifoldPoint line_set(const LinkState& e,
                                double excision_radius = kDefaultExcisionRadius);
};

struct GammaReport {
  ManifoldPoint point;
  Eigen::MatrixXd gamma;
  Eigen::VectorXd eigenvalues;  // ascending
  double min_eigenvalue = 0.0;
  bool positive_definite = false;
};

/// F(e) = (e1'Je2, e1+e2+e3): the line set is its zero set within R^6.
Vec3 defining_function_line_set(const LinkState& e);

/// Jacobian of F: rows (-e2'J, e1'J, 0) and the two replicated-identity
/// rows. Rank 3 on the line set away from the origin, rank 2 at the origin.
Mat36 jacobian_defining_function(const LinkState& e);

/// The four raw basis columns (-I,I,0) and (0,-I,I) of the collocated set's
/// normal complement within the link space, before orthonormalization.
const Mat64& collocated_normal_columns();

/// Orthonormalized version of collocated_normal_columns().
const Mat64& normal_basis_collocated();

/// Raw line-normal direction (-J e2, -J e3, -J e1). Lies in the link space.
Vec6 line_normal_direction(const LinkState& e);

/// Unit vector along line_normal_direction. Throws DegenerateError when the
/// direction norm falls below 1e-9 (only near the origin).
Vec6 normal_basis_line_set(const LinkState& e);

/// Unit normal of the line set that is orthogonal to its full tangent space
/// (including the rotation direction): the in-link-space component of the
/// first row of the defining-function Jacobian. line_normal_direction spans
/// a transversal instead; both are exposed.
Vec6 line_orthogonal_normal(const LinkState& e);

/// B^T (A + A^T) B with A = jacobian_links(e): the outward quadratic form
/// along arbitrary probe columns B.
Eigen::MatrixXd gamma_quadratic_form(
    const LinkState& e, const Eigen::Matrix<double, 6, Eigen::Dynamic>& basis,
    const FormationSpec& spec);

/// Gamma of the point's manifold evaluated on its orthonormal basis, with a
/// symmetric eigen decomposition and the positive-definiteness verdict.
GammaReport gamma_general(const ManifoldPoint& point, const FormationSpec& spec);

/// Closed form of Gamma at the collocated set for the raw basis columns:
/// blocks (2d1^2+4d2^2) I, (d1^2-3d2^2-d3^2) I, (2d2^2+4d3^2) I.
Mat4 gamma_collocated_from_squares(double d1_sq, double d2_sq, double d3_sq);

Mat4 gamma_collocated_closed(const FormationSpec& spec);

/// The two brackets of the simplified line-set Gamma on collinear states:
/// first = e2'(psi1 e1) + e3'(psi2 e2) + e1'(psi3 e3), which vanishes on
/// equilibria; second = psi1|e2|^2 + psi2|e3|^2 + psi3|e1|^2.
std::pair<double, double> gamma_line_brackets(const LinkState& e,
                                              const FormationSpec& spec);

/// Closed-form Gamma of the punctured line set along the raw line normal:
/// 2 * (first bracket - second bracket). Positive at every collinear
/// equilibrium. Throws PreconditionError unless e is a collinear
/// equilibrium away from the origin (residual <= 1e-8).
double gamma_line_closed(const LinkState& e, const FormationSpec& spec);

/// Same quantity via the per-case product forms: 2 d_k^2 |e_{k+1}|^2 when
/// link k vanishes, else 2 s (-psi1 / lambda(x)) ((x+1/2)^2+3/4)^3 /
/// (x^2 (1+x)^2) in the ratio parameterization e2 = x e1, s = |e1|^2.
double gamma_line_product_form(const LinkState& e, const FormationSpec& spec);

/// lambda(x) = 1 + 1/x - 1/(1+x). Throws DomainError at the poles 0 and -1.
double lambda_fn(double x);

}  // namespace triform
