// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "nids/errors.hpp"
#include "nids/loss.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace nids;

namespace {

// One row holding `p_true` on class 0 and the remainder spread evenly.
Matrix two_point(double p_true, Eigen::Index classes = 2) {
  Matrix p(1, classes);
  p(0, 0) = p_true;
  for (Eigen::Index i = 1; i < classes; ++i) p(0, i) = (1.0 - p_true) / static_cast<double>(classes - 1);
  return p;
}

Matrix target0(Eigen::Index classes = 2) {
  Matrix y = Matrix::Zero(1, classes);
  y(0, 0) = 1.0;
  return y;
}

FocalConfig focal(double gamma, Vector alpha) { return {gamma, std::move(alpha)}; }

}  // namespace

TEST_CASE("cfcl: worked values") {
  const Vector ones = Vector::Ones(2);
  CHECK(cfcl(two_point(0.5), target0(), focal(0.0, ones)) == doctest::Approx(0.69315).epsilon(1e-5));
  CHECK(cfcl(two_point(0.5), target0(), focal(2.0, ones)) == doctest::Approx(0.17329).epsilon(1e-4));
  for (double gamma : {0.0, 1.0, 2.0, 5.0}) {
    CHECK(cfcl(two_point(1.0), target0(), focal(gamma, Vector::Constant(2, 3.0))) == 0.0);
  }
  Vector alpha(2);
  alpha << 2.5, 1.0;
  CHECK(cfcl(two_point(0.5), target0(), focal(2.0, alpha)) == doctest::Approx(2.5 * 0.25 * std::log(2.0)));
}

TEST_CASE("categorical_ce: worked values") {
  Matrix uniform = Matrix::Constant(3, 4, 0.25);
  Matrix y = Matrix::Zero(3, 4);
  y(0, 0) = y(1, 3) = y(2, 1) = 1.0;
  CHECK(categorical_ce(uniform, y) == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  Matrix p(2, 2);
  p << 0.5, 0.5, 0.75, 0.25;
  Matrix t(2, 2);
  t << 1, 0, 0, 1;
  CHECK(categorical_ce(p, t) == doctest::Approx(1.03972).epsilon(1e-5));
}

TEST_CASE("categorical_ce matches cfcl with gamma 0 and unit alpha") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto classes = static_cast<Eigen::Index>(2 + rng.index(8));
    const auto batch = static_cast<Eigen::Index>(1 + rng.index(20));
    const Matrix p = test::softmax_rows(test::random_matrix(rng, batch, classes, 3.0));
    const Matrix y = test::random_targets(rng, static_cast<std::size_t>(batch), static_cast<std::size_t>(classes));
    CHECK(std::abs(categorical_ce(p, y) - cfcl(p, y, focal(0.0, Vector::Ones(classes)))) <= 1e-15);
  }
}

TEST_CASE("cfcl: probability floor keeps the loss finite") {
  Matrix p(1, 2);
  p << 0.0, 1.0;
  const double loss = cfcl(p, target0(), focal(0.0, Vector::Ones(2)));
  CHECK(loss == doctest::Approx(-std::log(kProbabilityFloor)));
  CHECK(cfcl_grad_logits(p, target0(), focal(2.0, Vector::Ones(2))).allFinite());
}

TEST_CASE("cfcl: shape errors") {
  const FocalConfig cfg = focal(2.0, Vector::Ones(2));
  CHECK_THROWS_AS(cfcl(Matrix::Constant(2, 2, 0.5), target0(), cfg), DataError);
  CHECK_THROWS_AS(cfcl(two_point(0.5, 3), target0(3), cfg), DataError);
  CHECK_THROWS_AS(cfcl(Matrix(0, 2), Matrix(0, 2), cfg), DataError);
  CHECK_THROWS_AS(cfcl_grad_logits(two_point(0.5, 3), target0(2), focal(0.0, Vector::Ones(3))), DataError);
  CHECK_THROWS_AS(cfcl(two_point(0.5), target0(), focal(-1.0, Vector::Ones(2))), UsageError);
}

TEST_CASE("cfcl_grad_logits: cross-entropy closed form") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto classes = static_cast<Eigen::Index>(2 + rng.index(6));
    const auto batch = static_cast<Eigen::Index>(1 + rng.index(16));
    const Matrix p = test::softmax_rows(test::random_matrix(rng, batch, classes, 2.0));
    const Matrix y = test::random_targets(rng, static_cast<std::size_t>(batch), static_cast<std::size_t>(classes));
    const Matrix g = cfcl_grad_logits(p, y, FocalConfig::cross_entropy(static_cast<std::size_t>(classes)));
    const Matrix expected = (p - y) / static_cast<double>(batch);
    CHECK((g - expected).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("cfcl_grad_logits: vanishes near a perfect prediction") {
  for (double gamma : {0.0, 2.0}) {
    const Matrix g = cfcl_grad_logits(two_point(1.0 - 1e-9, 3), target0(3), focal(gamma, Vector::Ones(3)));
    CHECK(g.norm() < 1e-6);
  }
}

TEST_CASE("cfcl_grad_logits: finite differences over the gamma and alpha grid") {
  Rng rng(17);
  for (double gamma : {0.0, 1.0, 2.0, 5.0}) {
    for (bool weighted : {false, true}) {
      for (int trial = 0; trial < 10; ++trial) {
        const auto classes = static_cast<Eigen::Index>(2 + rng.index(5));
        const auto batch = static_cast<Eigen::Index>(1 + rng.index(6));
        const FocalConfig cfg = focal(gamma, weighted ? test::random_alpha(rng, classes) : Vector::Ones(classes));
        const Matrix z = test::random_matrix(rng, batch, classes, 2.0);
        const Matrix y =
            test::random_targets(rng, static_cast<std::size_t>(batch), static_cast<std::size_t>(classes));
        INFO("gamma=" << gamma << " weighted=" << weighted << " trial=" << trial);
        CHECK(test::logit_gradient_error(z, y, cfg) <= 1e-6);
      }
    }
  }
}

TEST_CASE("cfcl: loss strictly decreases as the true-class probability grows") {
  Rng rng(3);
  for (double gamma : {0.0, 0.5, 2.0, 5.0}) {
    const FocalConfig cfg = focal(gamma, test::random_alpha(rng, 3));
    double previous = cfcl(two_point(0.001, 3), target0(3), cfg);
    for (double p = 0.002; p < 0.999; p += 0.001) {
      const double loss = cfcl(two_point(p, 3), target0(3), cfg);
      REQUIRE(loss < previous);
      previous = loss;
    }
  }
}

TEST_CASE("cfcl: focusing lowers the loss pointwise") {
  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const double p = 1e-6 + (1.0 - 2e-6) * rng.uniform();
    const Vector alpha = test::random_alpha(rng, 2);
    CHECK(cfcl(two_point(p), target0(), focal(2.0, alpha)) < cfcl(two_point(p), target0(), focal(0.0, alpha)));
  }
}

TEST_CASE("cfcl: alpha scaling scales loss and gradient") {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index classes = 4;
    const Matrix p = test::softmax_rows(test::random_matrix(rng, 5, classes, 2.0));
    const Matrix y = test::random_targets(rng, 5, classes);
    const FocalConfig base = focal(2.0, test::random_alpha(rng, classes));
    // A power of two scales every floating-point product exactly.
    const FocalConfig quadrupled = focal(2.0, base.alpha * 4.0);
    CHECK(cfcl(p, y, quadrupled) == 4.0 * cfcl(p, y, base));
    CHECK(cfcl_grad_logits(p, y, quadrupled) == 4.0 * cfcl_grad_logits(p, y, base));

    const double c = 0.1 + 5.0 * rng.uniform();
    const FocalConfig scaled = focal(2.0, base.alpha * c);
    CHECK(cfcl(p, y, scaled) == doctest::Approx(c * cfcl(p, y, base)).epsilon(1e-14));
    CHECK((cfcl_grad_logits(p, y, scaled) - c * cfcl_grad_logits(p, y, base)).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("AlphaSpec: parsing and printing") {
  CHECK(AlphaSpec::parse("uniform").mode == AlphaMode::kUniform);
  CHECK(AlphaSpec::parse(" Inverse-Frequency ").mode == AlphaMode::kInverseFrequency);
  const AlphaSpec e = AlphaSpec::parse("explicit:1,0.5,2");
  CHECK(e.mode == AlphaMode::kExplicit);
  CHECK(e.values == std::vector<double>{1.0, 0.5, 2.0});
  CHECK(AlphaSpec::parse(e.to_string()).values == e.values);
  CHECK(AlphaSpec::parse("uniform").to_string() == "uniform");
  CHECK_THROWS_AS(AlphaSpec::parse("balanced"), UsageError);
  CHECK_THROWS_AS(AlphaSpec::parse("explicit:1,-2"), UsageError);
  CHECK_THROWS_AS(AlphaSpec::parse("explicit:1,,2"), UsageError);
  CHECK_THROWS_AS(AlphaSpec::parse("explicit:1,x"), UsageError);
}

TEST_CASE("resolve_alpha") {
  const std::vector<std::size_t> hist = {900, 90, 10};
  CHECK(resolve_alpha(AlphaSpec::parse("uniform"), hist) == Vector::Ones(3));

  const Vector inv = resolve_alpha(AlphaSpec{}, hist);
  // N / (C * N_i) = 1000/2700, 1000/270, 1000/30, then divided by their mean.
  const double raw[3] = {1000.0 / 2700.0, 1000.0 / 270.0, 1000.0 / 30.0};
  const double mean = (raw[0] + raw[1] + raw[2]) / 3.0;
  for (int i = 0; i < 3; ++i) CHECK(inv(i) == doctest::Approx(raw[i] / mean).epsilon(1e-14));
  CHECK(inv.mean() == doctest::Approx(1.0).epsilon(1e-14));

  CHECK(resolve_alpha(AlphaSpec{}, {50, 50, 50}).isOnes(1e-15));
  const Vector absent = resolve_alpha(AlphaSpec{}, {100, 0, 25});
  CHECK(absent(1) == 1.0);
  CHECK(absent(2) == doctest::Approx(4.0 * absent(0)));
  CHECK(resolve_alpha(AlphaSpec{}, {0, 0}).isOnes());

  CHECK(resolve_alpha(AlphaSpec::parse("explicit:1,2,3"), hist) == Vector::LinSpaced(3, 1.0, 3.0));
  CHECK_THROWS_AS(resolve_alpha(AlphaSpec::parse("explicit:1,2"), hist), UsageError);
}

TEST_CASE("FocalConfig::cross_entropy") {
  const FocalConfig ce = FocalConfig::cross_entropy(5);
  CHECK(ce.gamma == 0.0);
  CHECK(ce.alpha == Vector::Ones(5));
}
