#include <gtest/gtest.h>

#include <cmath>

#include "wlingam/error.hpp"
#include "wlingam/synth.hpp"

using namespace wlingam;

namespace {

GeneratorSpec zero_spec(NoiseKind kind, double scale, std::size_t n) {
  GeneratorSpec spec = small_spec(n, 17);
  spec.truth = LongitudinalModel::zero(spec.truth.schema);
  spec.noise.assign(2, NoiseSpec{kind, scale});
  return spec;
}

struct Moments {
  double mean, var, kurtosis;
};

Moments moments(const Eigen::VectorXd& x) {
  const double mean = x.mean();
  const Eigen::ArrayXd c = x.array() - mean;
  const double var = c.square().mean();
  return {mean, var, c.pow(4).mean() / (var * var)};
}

}  // namespace

TEST(Synth, NoiseLawsHaveTheirMoments) {
  const std::size_t n = 200000;
  struct Case {
    NoiseKind kind;
    double kurtosis;
  };
  for (const Case c : {Case{NoiseKind::Uniform, 1.8}, Case{NoiseKind::Laplace, 6.0}, Case{NoiseKind::Gaussian, 3.0}}) {
    const Generated g = generate(zero_spec(c.kind, 2.0, n));
    const Moments m = moments(g.panel.slice_time(1).col(1));
    EXPECT_NEAR(m.mean, 0.0, 0.03) << to_string(c.kind);
    EXPECT_NEAR(m.var, 4.0, 0.08) << to_string(c.kind);
    EXPECT_NEAR(m.kurtosis, c.kurtosis, 0.15 * c.kurtosis) << to_string(c.kind);
  }
  // 0.5 N(+-0.8, 0.36): variance 1, fourth moment 3 sigma^4 + 6 mu^2 sigma^2 + mu^4
  const Generated g = generate(zero_spec(NoiseKind::MixtureGaussian, 1.0, n));
  const Moments m = moments(g.panel.slice_time(2).col(2));
  EXPECT_NEAR(m.mean, 0.0, 0.02);
  EXPECT_NEAR(m.var, 1.0, 0.02);
  EXPECT_NEAR(m.kurtosis, 3 * 0.1296 + 6 * 0.64 * 0.36 + 0.4096, 0.1);
}

TEST(Synth, SameSeedSamePanel) {
  const Generated a = generate(small_spec(300, 4));
  const Generated b = generate(small_spec(300, 4));
  EXPECT_TRUE(a.panel == b.panel);
  const Generated c = generate(small_spec(300, 5));
  EXPECT_FALSE(a.panel == c.panel);
}

TEST(Synth, GaussianNoiseWarns) {
  const Generated g = generate(zero_spec(NoiseKind::Gaussian, 1.0, 10));
  EXPECT_TRUE(g.non_identifiable);
  ASSERT_EQ(g.warnings.size(), 1u);
  EXPECT_EQ(g.warnings[0].rfind("NonIdentifiable", 0), 0u);
  EXPECT_FALSE(generate(small_spec(10, 1)).non_identifiable);
}

TEST(Synth, ZeroModelHasZeroTrueEffects) {
  const Generated g = generate(zero_spec(NoiseKind::Uniform, 1.0, 10));
  ASSERT_FALSE(g.true_effects.empty());
  for (const auto& e : g.true_effects) EXPECT_EQ(e.value, 0.0);
}

TEST(Synth, TrueEffectsMatchPathOracle) {
  const GeneratorSpec spec = small_spec(10, 1);
  const Generated g = generate(spec);
  const auto sys = StackedSystem::build(spec.truth);
  for (const auto& e : g.true_effects) {
    EXPECT_NEAR(e.value, oracle_total_effect(sys, sys.index(e.source), sys.index(e.target)), 1e-12);
  }
}

TEST(Synth, ScreeningShapeLayout) {
  const Generated g = generate(paper_shaped_spec(100, 3));
  const PanelSchema& s = g.panel.schema();
  EXPECT_EQ(g.panel.subjects(), 100u);
  EXPECT_EQ(g.true_effects.size(), 15u);
  // intervention placeholder at t = 0, age advancing by one per visit
  EXPECT_TRUE(g.panel.slice_time(0).col(static_cast<Eigen::Index>(s.intervention())).isZero());
  const auto age = static_cast<Eigen::Index>(s.index_of("Age"));
  EXPECT_TRUE((g.panel.slice_time(3).col(age).array() - g.panel.slice_time(0).col(age).array() == 3.0).all());
}

TEST(Synth, LogisticAssignmentTracksFirstOutcome) {
  GeneratorSpec spec = small_spec(40000, 8);
  spec.law.logistic_assignment = true;
  spec.law.logistic_slope = 2.0;
  const Panel p = generate(spec).panel;
  const Eigen::VectorXd x0 = p.slice_time(0).col(1);
  const Eigen::VectorXd v1 = p.slice_time(1).col(0);
  double high = 0, high_n = 0, low = 0, low_n = 0;
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    if (x0(i) > 0) {
      high += v1(i);
      ++high_n;
    } else {
      low += v1(i);
      ++low_n;
    }
  }
  EXPECT_GT(high / high_n, low / low_n + 0.2);
}

TEST(Synth, ForbiddenTruthRejected) {
  GeneratorSpec spec = small_spec(10, 1);
  auto mask = *spec.mask;
  mask.within[1](1, 0) = mark::kForbidden;  // v -> x1 at t = 1, where alpha is -0.5
  spec.mask = mask;
  try {
    generate(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonAdmissibleModel);
  }
}

TEST(Synth, CyclicTruthRejected) {
  GeneratorSpec spec = small_spec(10, 1);
  spec.truth.B_within[2](0, 1) = 0.3;
  EXPECT_THROW(generate(spec), Error);
}

TEST(Synth, NamedSpecs) {
  EXPECT_EQ(named_spec("small", 5, 0).truth.schema.size(), 4u);
  EXPECT_EQ(named_spec("paper-shaped", 5, 0).truth.schema.size(), 15u);
  EXPECT_THROW(named_spec("huge", 5, 0), Error);
}
