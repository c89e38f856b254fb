#include <gtest/gtest.h>

#include "test_support.hpp"
#include "wlingam/error.hpp"
#include "wlingam/mask.hpp"

using namespace wlingam;
namespace wt = wlingam::testing;

namespace {

struct ScreeningMask : ::testing::Test {
  PanelSchema schema = PanelSchema::paper_shaped();
  PKMask mask = build_default_mask(schema);
  std::size_t id(const char* name) const { return schema.index_of(name); }
};

}  // namespace

TEST_F(ScreeningMask, OutcomePairsAreUnknown) {
  for (std::size_t t = 1; t < 4; ++t) {
    EXPECT_EQ(mask.within_at(t, id("SBP"), id("BMI")), mark::kUnknown);
    EXPECT_EQ(mask.within_at(t, id("BMI"), id("SBP")), mark::kUnknown);
  }
}

TEST_F(ScreeningMask, MedicationAndLifestyleAreUnlinked) {
  for (std::size_t t = 1; t < 4; ++t) {
    EXPECT_EQ(mask.within_at(t, id("Smoke"), id("Drug-HT")), mark::kForbidden);
    EXPECT_EQ(mask.within_at(t, id("Drug-HT"), id("Smoke")), mark::kForbidden);
  }
}

TEST_F(ScreeningMask, NoLagBeyondOne) {
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t lag = 0; lag < 4; ++lag) {
      if (lag == 1) continue;
      EXPECT_TRUE((mask.cross[t][lag].array() == 0).all()) << "t=" << t << " lag=" << lag;
    }
  }
}

TEST_F(ScreeningMask, InterventionHasNoWithinTimeParents) {
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_TRUE((mask.within[t].row(static_cast<Eigen::Index>(schema.intervention())).array() == 0).all());
  }
}

TEST_F(ScreeningMask, NoDirectLaggedInterventionToOutcome) {
  for (std::size_t t = 1; t < 4; ++t) {
    for (std::size_t x : schema.outcomes()) {
      EXPECT_EQ(mask.cross_at(t, 1, x, schema.intervention()), mark::kForbidden);
    }
  }
}

TEST_F(ScreeningMask, BaselineFeedsOnlyTheFirstModeledTime) {
  const std::size_t w = *schema.baseline();
  EXPECT_EQ(mask.cross_at(1, 1, id("SBP"), w), mark::kRequired);
  EXPECT_EQ(mask.cross_at(2, 1, id("SBP"), w), mark::kForbidden);
  EXPECT_EQ(mask.cross_at(3, 1, id("SBP"), w), mark::kForbidden);
}

TEST_F(ScreeningMask, DefaultIsValid) {
  const ValidationReport r = validate_mask(mask, schema);
  EXPECT_TRUE(r.ok()) << (r.ok() ? "" : r.violations.front().detail);
}

// Per modeled time point (t = 1..3):
//   within unknown: each medication and lifestyle child has the intervention
//   and the two background variables as candidate parents (6 x 3); each of the
//   5 outcomes has those 3, the 6 covariates and the 4 other outcomes (5 x 13).
//   cross lag 1: 11 non-background parents (5 outcomes, 6 covariates) feed the
//   12 non-background children; background variables keep their self-lag (2);
//   the baseline feeds the 12 non-background children at t = 1 only; the
//   lagged intervention feeds itself and the 6 covariates from t = 2 on.
TEST_F(ScreeningMask, DefaultCounts) {
  const std::size_t within = 3 * (6 * 3 + 5 * 13);
  const std::size_t cross_t1 = 11 * 12 + 2 + 12;
  const std::size_t cross_later = 11 * 12 + 2 + 7;
  EXPECT_EQ(admissible_edge_count(mask), (EdgeCounts{within, 0, cross_t1 + 2 * cross_later}));
}

TEST(MaskCounts, AllForbidden) {
  EXPECT_EQ(admissible_edge_count(PKMask::forbidden(6, 3)), (EdgeCounts{0, 0, 0}));
}

TEST(MaskCounts, AllUnknownFiveVariables) {
  PKMask m = PKMask::forbidden(5, 1);
  m.within[0].setConstant(mark::kUnknown);
  m.within[0].diagonal().setZero();
  EXPECT_EQ(admissible_edge_count(m).within_unknown, 20u);
}

TEST(MaskValidate, CatchesEachViolationKind) {
  const PanelSchema schema = PanelSchema::paper_shaped();
  const PKMask good = build_default_mask(schema);
  const std::size_t v = schema.intervention();
  const std::size_t w = *schema.baseline();
  const std::size_t bmi = schema.index_of("BMI");
  const std::size_t sbp = schema.index_of("SBP");
  const std::size_t dbp = schema.index_of("DBP");

  auto check = [&](auto mutate, ViolationKind kind) {
    PKMask m = good;
    mutate(m);
    EXPECT_TRUE(validate_mask(m, schema).has(kind)) << to_string(kind);
  };
  auto at = [](IntMatrix& M, std::size_t i, std::size_t j) -> int& {
    return M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };

  check([&](PKMask& m) { at(m.within[1], bmi, sbp) = 2; }, ViolationKind::ValueOutOfDomain);
  check([&](PKMask& m) { at(m.within[1], bmi, bmi) = -1; }, ViolationKind::SelfLoop);
  check([&](PKMask& m) {
    at(m.within[2], sbp, bmi) = 1;
    at(m.within[2], dbp, sbp) = 1;
    at(m.within[2], bmi, dbp) = 1;
  }, ViolationKind::RequiredEdgesCyclic);
  check([&](PKMask& m) { at(m.within[1], v, bmi) = -1; }, ViolationKind::NoInstantaneousParentsOfIntervention);
  check([&](PKMask& m) { at(m.cross[3][2], bmi, bmi) = 1; }, ViolationKind::CrossLagBeyondOne);
  check([&](PKMask& m) { at(m.cross[2][0], bmi, bmi) = 1; }, ViolationKind::CrossLagZeroSlotUsed);
  check([&](PKMask& m) { at(m.within[1], w, bmi) = -1; }, ViolationKind::EdgeIntoBaselineOnly);
  check([&](PKMask& m) { at(m.cross[2][1], bmi, w) = 1; }, ViolationKind::BaselineOnlyNotIsolated);
  check([&](PKMask& m) { at(m.within[0], sbp, bmi) = -1; }, ViolationKind::WithinTimeAtTimeZero);
}

TEST(MaskValidate, WrongShapeIsDimensionMismatch) {
  const PanelSchema schema = PanelSchema::paper_shaped();
  try {
    validate_mask(PKMask::forbidden(14, 4), schema);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(MaskBlocks, InterventionOutsideFirstTierIsInconsistent) {
  const PanelSchema schema = PanelSchema::paper_shaped();
  BlockOrder order = default_block_order(schema);
  Block intervention = order.tiers[0].front();
  order.tiers[0].erase(order.tiers[0].begin());
  order.tiers[1].push_back(intervention);
  try {
    build_default_mask(schema, order);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BlockOrderInconsistent);
  }
}

TEST(MaskBlocks, UncoveredVariableIsInconsistent) {
  const PanelSchema schema = PanelSchema::paper_shaped();
  BlockOrder order = default_block_order(schema);
  order.tiers[1].pop_back();
  EXPECT_THROW(build_default_mask(schema, order), Error);
}

TEST(RequiredCycles, DetectsTwoCycle) {
  IntMatrix m = IntMatrix::Zero(3, 3);
  m(1, 0) = 1;
  EXPECT_FALSE(required_edges_cyclic(m));
  m(0, 1) = 1;
  EXPECT_TRUE(required_edges_cyclic(m));
}

TEST(Admits, RespectsForbiddenAndRequired) {
  IntMatrix mask(3, 3);
  mask << 0, -1, 0,
          1, 0, -1,
          -1, -1, 0;
  IntMatrix adj = IntMatrix::Zero(3, 3);
  adj(1, 0) = 1;
  EXPECT_TRUE(admits(mask, adj));
  adj(0, 2) = 1;
  EXPECT_FALSE(admits(mask, adj));
  adj(0, 2) = 0;
  adj(1, 0) = 0;
  EXPECT_FALSE(admits(mask, adj));
}

// Property: masks produced by the default builder plus admissible random
// edits always validate.
TEST(MaskProperty, RandomAdmissibleMasksValidate) {
  Philox rng(99, 0);
  for (int k = 0; k < 100; ++k) {
    const PanelSchema schema = wt::make_schema(2 + rng.below(4), 2 + rng.below(4), 2 + rng.below(3),
                                                    rng.bernoulli(0.5));
    const PKMask m = wt::random_admissible_mask(schema, rng);
    EXPECT_TRUE(validate_mask(m, schema).ok());
  }
}
