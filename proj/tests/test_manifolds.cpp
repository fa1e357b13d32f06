#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "triform/equilibria.hpp"
#include "triform/experiments.hpp"
#include "triform/manifolds.hpp"
#include "triform/random.hpp"

using namespace triform;

namespace {

const FormationSpec kUnit(1.0, 1.0, 1.0);

LinkState unit_equilateral_links() {
  const Vec2 z1(0.0, 0.0), z2(1.0, 0.0), z3(0.5, std::sqrt(3.0) / 2.0);
  return links_from_positions(PositionState(z1, z2, z3));
}

LinkState equilateral_collinear_equilibrium() {
  // Ratio 1 branch of the unit equilateral formation.
  return collinear_state_from_ratio(1.0, 1.0 / 3.0);
}

}  // namespace

TEST_CASE("defining function of the line set") {
  // Axis-aligned collinear states evaluate to exact zeros.
  const LinkState collinear(Vec2(0.4, 0), Vec2(1.1, 0), Vec2(-1.5, 0));
  CHECK(defining_function_line_set(collinear).norm() == 0.0);

  const Vec3 f = defining_function_line_set(unit_equilateral_links());
  CHECK(f(0) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));

  // Rank 3 on the punctured line set, rank loss at the origin.
  Eigen::JacobiSVD<Mat36> svd_c(jacobian_defining_function(collinear));
  CHECK(svd_c.singularValues()(2) > 1e-9);
  Eigen::JacobiSVD<Mat36> svd_0(jacobian_defining_function(LinkState()));
  CHECK(svd_0.singularValues()(2) <= 1e-15);
}

TEST_CASE("defining-function jacobian matches finite differences") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    Vec6 ev;
    for (int k = 0; k < 6; ++k) ev(k) = rng.normal();
    const LinkState e(ev);
    const Mat36 a = jacobian_defining_function(e);
    CHECK((a - fd_jacobian_defining(e)).norm() <= 1e-6 * (1.0 + a.norm()));
  }
}

TEST_CASE("collocated normal basis") {
  const Mat64& raw = collocated_normal_columns();
  const Mat64& onb = normal_basis_collocated();

  CHECK((onb.transpose() * onb - Mat4::Identity()).norm() <= 1e-12);
  for (int c = 0; c < 4; ++c) {
    CHECK(LinkState(Vec6(raw.col(c))).cycle_residual() == 0.0);
    CHECK(LinkState(Vec6(onb.col(c))).cycle_residual() <= 1e-14);
  }

  // Same span: projecting the raw columns onto the orthonormal set loses
  // nothing.
  for (int c = 0; c < 4; ++c) {
    const Vec6 v = raw.col(c);
    const Vec6 residual = v - onb * (onb.transpose() * v);
    CHECK(residual.norm() <= 1e-12);
  }
}

TEST_CASE("line-set normal direction") {
  const LinkState e(Vec2(1, 0), Vec2(1, 0), Vec2(-2, 0));
  const Vec6 n = normal_basis_line_set(e);
  Vec6 expected;
  expected << 0, -1, 0, 2, 0, -1;
  expected.normalize();
  CHECK(std::abs(std::abs(n.dot(expected)) - 1.0) <= 1e-14);
  CHECK(LinkState(n).cycle_residual() <= 1e-14);
  CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(normal_basis_line_set(LinkState()), DegenerateError);
}

TEST_CASE("orthogonal line normal is orthogonal to numeric tangents") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const double x = rng.uniform(-3.0, 3.0);
    if (std::abs(x) < 0.1 || std::abs(1.0 + x) < 0.1) continue;
    const double s = rng.uniform(0.2, 2.0);
    const LinkState e = collinear_state_from_ratio(x, s);
    const Vec6 n = line_orthogonal_normal(e);
    CHECK(LinkState(n).cycle_residual() <= 1e-12);

    const double h = 1e-6;
    const Vec2 u = e.e1().normalized();

    // Scaling curves within the collinear family.
    const auto scale_curve = [&](double t, int block) {
      LinkState out = e;
      out.e.segment<2>(2 * block) += t * u;
      out.e.segment<2>(4) = -(out.e1() + out.e2());
      return out;
    };
    for (int block : {0, 1}) {
      const Vec6 tangent =
          (scale_curve(h, block).e - scale_curve(-h, block).e) / (2.0 * h);
      CHECK(std::abs(n.dot(tangent.normalized())) <= 1e-8);
    }

    // Rotation curve.
    const auto rotate = [&](double t) {
      Eigen::Matrix2d R;
      R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
      LinkState out;
      for (int k = 0; k < 3; ++k) {
        out.e.segment<2>(2 * k) = R * e.e.segment<2>(2 * k);
      }
      return out;
    };
    const Vec6 tangent = (rotate(h).e - rotate(-h).e) / (2.0 * h);
    CHECK(std::abs(n.dot(tangent.normalized())) <= 1e-8);
  }
}

TEST_CASE("printed line normal spans a transversal, not the orthogonal one") {
  // The two directions agree only up to the rotation-tangent component;
  // both stay clear of the in-line scaling directions.
  const LinkState e = equilateral_collinear_equilibrium();
  const Vec6 printed = normal_basis_line_set(e);
  const Vec2 u = e.e1().normalized();
  Vec6 t1, t2;
  t1 << u, Vec2::Zero(), -u;
  t2 << Vec2::Zero(), u, -u;
  CHECK(std::abs(printed.dot(t1.normalized())) <= 1e-12);
  CHECK(std::abs(printed.dot(t2.normalized())) <= 1e-12);
}

TEST_CASE("collocated gamma closed form") {
  const Mat4 g = gamma_collocated_closed(kUnit);
  Mat4 expected;
  expected << 6, 0, -3, 0,  //
      0, 6, 0, -3,          //
      -3, 0, 6, 0,          //
      0, -3, 0, 6;
  CHECK((g - expected).norm() == 0.0);

  Eigen::SelfAdjointEigenSolver<Mat4> es(g);
  CHECK(es.eigenvalues()(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(es.eigenvalues()(1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(es.eigenvalues()(2) == doctest::Approx(9.0).epsilon(1e-14));
  CHECK(es.eigenvalues()(3) == doctest::Approx(9.0).epsilon(1e-14));

  // Near the triangle-inequality boundary the form stays positive
  // definite.
  const FormationSpec near_degenerate(1.0, 1.0, 1.99);
  Eigen::SelfAdjointEigenSolver<Mat4> es2(
      gamma_collocated_closed(near_degenerate));
  CHECK(es2.eigenvalues()(0) > 0.0);

  // Forcing the degenerate triple (1,1,2) through the raw-squares form:
  // the blocks become [[6,-6],[-6,18]], whose eigenvalues 12 -+ 6 sqrt(2)
  // are still positive; definiteness is lost only deeper in the
  // non-realizable region.
  Eigen::SelfAdjointEigenSolver<Mat4> es3(
      gamma_collocated_from_squares(1.0, 1.0, 4.0));
  CHECK(es3.eigenvalues()(0) ==
        doctest::Approx(12.0 - 6.0 * std::sqrt(2.0)).epsilon(1e-12));
  Eigen::SelfAdjointEigenSolver<Mat4> es4(
      gamma_collocated_from_squares(100.0, 1.0, 1.0));
  CHECK(es4.eigenvalues()(0) < 0.0);
}

TEST_CASE("collocated gamma positive over valid specs") {
  Rng rng(23);
  for (int i = 0; i < 1000; ++i) {
    const FormationSpec spec = sample_spec(rng);
    Eigen::SelfAdjointEigenSolver<Mat4> es(gamma_collocated_closed(spec));
    CHECK(es.eigenvalues()(0) > 0.0);
  }
}

TEST_CASE("general gamma reproduces the closed collocated form") {
  Rng rng(29);
  for (int i = 0; i < 100; ++i) {
    const FormationSpec spec = sample_spec(rng);
    const Eigen::MatrixXd general =
        gamma_quadratic_form(LinkState(), collocated_normal_columns(), spec);
    const Mat4 closed = gamma_collocated_closed(spec);
    CHECK((general - closed).cwiseAbs().maxCoeff() <= 1e-10 * closed.norm());
  }
}

TEST_CASE("gamma reports") {
  const GammaReport collocated = gamma_general(ManifoldPoint::collocated(), kUnit);
  CHECK(collocated.positive_definite);
  CHECK(collocated.gamma.rows() == 4);
  CHECK((collocated.gamma - collocated.gamma.transpose()).norm() <= 1e-12);

  const LinkState e = equilateral_collinear_equilibrium();
  const GammaReport line = gamma_general(ManifoldPoint::line_set(e), kUnit);
  CHECK(line.gamma.rows() == 1);
  CHECK(line.positive_definite);
  // Unit-basis value equals the raw closed form divided by the squared raw
  // norm (here 2 / 2 = 1).
  const double raw_norm_sq = line_normal_direction(e).squaredNorm();
  CHECK(line.gamma(0, 0) ==
        doctest::Approx(gamma_line_closed(e, kUnit) / raw_norm_sq)
            .epsilon(1e-12));
}

TEST_CASE("manifold point preconditions") {
  CHECK_THROWS_AS(ManifoldPoint::line_set(unit_equilateral_links()),
                  PreconditionError);
  const LinkState tiny(Vec2(1e-5, 0), Vec2(1e-5, 0), Vec2(-2e-5, 0));
  CHECK_THROWS_AS(ManifoldPoint::line_set(tiny), PreconditionError);
  CHECK_NOTHROW(ManifoldPoint::line_set(tiny, 1e-6));
}

TEST_CASE("line gamma closed form on the equilateral branch") {
  const LinkState e = equilateral_collinear_equilibrium();
  CHECK(gamma_line_closed(e, kUnit) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(gamma_line_product_form(e, kUnit) ==
        doctest::Approx(2.0).epsilon(1e-12));

  const auto [first, second] = gamma_line_brackets(e, kUnit);
  CHECK(std::abs(first) <= 1e-12);
  CHECK(second == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("line gamma on a collocated-pair equilibrium") {
  const FormationSpec spec(1.0, 2.0, 2.0);
  const LinkState e(Vec2(0, 0), Vec2(2, 0), Vec2(-2, 0));
  const double g = gamma_line_closed(e, spec);
  CHECK(g == doctest::Approx(8.0).epsilon(1e-12));  // 2 d1^2 |e2|^2
  CHECK(gamma_line_product_form(e, spec) == doctest::Approx(g).epsilon(1e-12));
}

TEST_CASE("line gamma requires an equilibrium") {
  const LinkState not_equilibrium(Vec2(1, 0), Vec2(0.3, 0), Vec2(-1.3, 0));
  CHECK_THROWS_AS(gamma_line_closed(not_equilibrium, kUnit),
                  PreconditionError);
  CHECK_THROWS_AS(gamma_line_closed(unit_equilateral_links(), kUnit),
                  PreconditionError);
}

TEST_CASE("closed and product routes agree over solved equilibria") {
  Rng rng(31);
  int checked = 0;
  for (int i = 0; i < 50; ++i) {
    const FormationSpec spec = sample_spec(rng);
    for (const EquilibriumRecord& r : collinear_equilibria(spec).records) {
      if (r.kind != EquilibriumKind::CollinearDistinct &&
          r.kind != EquilibriumKind::CollinearCollocatedPair) {
        continue;
      }
      ++checked;
      const double closed = gamma_line_closed(r.e, spec);
      const double product = gamma_line_product_form(r.e, spec);
      CHECK(std::abs(closed - product) <= 1e-10 * std::abs(closed));
      CHECK(closed > 0.0);

      // The general evaluator along the raw direction matches too.
      const Eigen::MatrixXd general =
          gamma_quadratic_form(r.e, line_normal_direction(r.e), spec);
      CHECK(std::abs(general(0, 0) - closed) <= 1e-9 * std::abs(closed));
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("lambda function") {
  CHECK(lambda_fn(1.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(lambda_fn(-0.5) == doctest::Approx(-3.0).epsilon(1e-15));
  CHECK(lambda_fn(1e-12) > 1e11);
  CHECK_THROWS_AS(lambda_fn(0.0), DomainError);
  CHECK_THROWS_AS(lambda_fn(-1.0), DomainError);
}
