#pragma once

// Enumeration and classification of the equilibria of the link dynamics:
// the two target-formation classes and the collinear family, solved through
// the ratio parameterization e2 = x e1, e3 = -(1+x) e1, s = |e1|^2.

#include <optional>
#include <string>
#include <vector>

#include "triform/manifolds.hpp"

namespace triform {

enum class EquilibriumKind {
  Target,
  CollinearCollocatedPair,
  CollinearDistinct,
  Origin,
};

const char* to_string(EquilibriumKind kind);

struct EquilibriumRecord {
  LinkState e;
  EquilibriumKind kind = EquilibriumKind::Origin;
  double x = 0.0;  // ratio e2 = x e1; NaN where the ratio is undefined
  double s = 0.0;  // |e1|^2
  PsiVector psi_values = PsiVector::Zero();
  double psi_sum = 0.0;
  // Outward quadratic form along the line normal for collinear records; the
  // smallest eigenvalue of the collocated form for the origin; NaN for
  // target records.
  double gamma = 0.0;
  std::optional<Mat4> gamma_matrix;  // origin only
  Eigen::Vector4cd link_jacobian_eigenvalues = Eigen::Vector4cd::Zero();

  bool collinear_family() const { return kind != EquilibriumKind::Target; }
};

struct EquilibriumCatalog {
  std::vector<EquilibriumRecord> records;
  // True when the collinear equilibria form a one-parameter family (all
  // three distances equal); records then hold canonical representatives.
  bool continuum_family = false;
  std::vector<std::string> warnings;
};

/// Collinear state e1 = (sqrt(s), 0), e2 = x e1, e3 = -(1+x) e1.
LinkState collinear_state_from_ratio(double x, double s);

/// All collinear equilibria of the link dynamics, canonically oriented with
/// e1 on the positive x-axis (e2 when e1 = 0): the origin, the
/// collocated-pair branches, and the distinct branches found by bracketing
/// the ratio polynomial over both x and 1/x. Rotational orbits are implied.
EquilibriumCatalog collinear_equilibria(const FormationSpec& spec);

/// The two congruence classes (reflection pair) of the target triangle,
/// realized with e1 on the positive x-axis; psi vanishes by construction.
std::vector<EquilibriumRecord> target_equilibria(const FormationSpec& spec);

struct PsiSumReport {
  int checked = 0;
  double min_margin = 0.0;  // min over records of -(psi1+psi2+psi3)
};

/// Asserts psi_sum < 0 on every collinear-family record. Throws
/// VerificationError listing the violators (none are expected).
PsiSumReport verify_psi_sum_negative(const std::vector<EquilibriumRecord>& records);

/// Distance from e to the rotation orbit { blockdiag(R,R,R) r : R in SO(2) }.
double rotation_orbit_distance(const LinkState& e, const LinkState& reference);

/// Minimum rotation-orbit distance from e to any of the given records.
double min_distance_to_records(const LinkState& e,
                               const std::vector<EquilibriumRecord>& records);

}  // namespace triform
