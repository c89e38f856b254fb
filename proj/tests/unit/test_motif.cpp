#include <gtest/gtest.h>

#include <algorithm>

#include "wlingam/error.hpp"
#include "wlingam/motif.hpp"
#include "wlingam/rng.hpp"

using namespace wlingam;

namespace {

// outcome-local: BMI 0, SBP 1, DBP 2, HbA1c 3, LDL 4
LongitudinalModel screening_zero() { return LongitudinalModel::zero(PanelSchema::paper_shaped()); }

void set_all(LongitudinalModel& m, std::size_t child, std::size_t parent, double b) {
  for (std::size_t t = 1; t < m.time_points(); ++t) {
    m.B_within[t](static_cast<Eigen::Index>(child), static_cast<Eigen::Index>(parent)) = b;
  }
}

bool contains(const std::vector<MotifEdge>& edges, MotifEdge e) {
  return std::find(edges.begin(), edges.end(), e) != edges.end();
}

}  // namespace

TEST(Motif, StableDirectionIsDirected) {
  LongitudinalModel m = screening_zero();
  set_all(m, 1, 0, 0.6);  // BMI -> SBP
  const Motif motif = extract_motif(m);
  EXPECT_EQ(motif.directed, (std::vector<MotifEdge>{{0, 1}}));
  EXPECT_TRUE(motif.undirected.empty());
}

TEST(Motif, FlippingDirectionIsUndirected) {
  LongitudinalModel m = screening_zero();
  m.B_within[1](2, 1) = 0.5;  // SBP -> DBP
  m.B_within[2](1, 2) = 0.5;  // DBP -> SBP
  m.B_within[3](2, 1) = 0.5;
  const Motif motif = extract_motif(m);
  EXPECT_TRUE(motif.directed.empty());
  EXPECT_EQ(motif.undirected, (std::vector<MotifEdge>{{1, 2}}));
}

TEST(Motif, EdgeMissingAtOneTimeIsDropped) {
  LongitudinalModel m = screening_zero();
  set_all(m, 3, 0, 0.4);
  m.B_within[2](3, 0) = 0.0;
  EXPECT_TRUE(extract_motif(m).directed.empty());
}

TEST(Motif, ThresholdIsStrict) {
  LongitudinalModel m = screening_zero();
  set_all(m, 4, 3, 0.01);
  EXPECT_TRUE(extract_motif(m, {.threshold = 0.01, .standardized = false}).directed.empty());
  set_all(m, 4, 3, -0.0100001);
  EXPECT_EQ(extract_motif(m, {.threshold = 0.01, .standardized = false}).directed.size(), 1u);
}

TEST(Motif, StandardizationUsesScales) {
  LongitudinalModel m = screening_zero();
  set_all(m, 3, 0, 0.005);  // BMI -> HbA1c, raw coefficient below threshold
  const auto bmi = static_cast<Eigen::Index>(m.schema.index_of("BMI"));
  const auto hba1c = static_cast<Eigen::Index>(m.schema.index_of("HbA1c"));
  for (std::size_t t = 1; t < 4; ++t) {
    m.scales[t](bmi) = 4.0;
    m.scales[t](hba1c) = 0.5;
  }
  EXPECT_TRUE(extract_motif(m, {.standardized = false}).directed.empty());
  // 0.005 * 4 / 0.5 = 0.04
  EXPECT_EQ(extract_motif(m).directed, (std::vector<MotifEdge>{{0, 3}}));
}

TEST(Motif, RejectsBadInputs) {
  const LongitudinalModel m = screening_zero();
  EXPECT_THROW(extract_motif(m, {.threshold = -0.1}), Error);
  const PanelSchema two({{"v", Role::Intervention, ValueKind::Binary, ""},
                         {"a", Role::Outcome, ValueKind::Continuous, ""},
                         {"b", Role::Outcome, ValueKind::Continuous, ""}},
                        {0, 1});
  try {
    extract_motif(LongitudinalModel::zero(two));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

// Property: raising the threshold never adds an edge.
TEST(Motif, AntiMonotoneInThreshold) {
  Philox rng(41, 0);
  for (int trial = 0; trial < 100; ++trial) {
    LongitudinalModel m = screening_zero();
    for (std::size_t t = 1; t < 4; ++t) {
      for (Eigen::Index i = 0; i < 5; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
          if (rng.bernoulli(0.5)) m.B_within[t](i, j) = 0.2 * (2.0 * rng.uniform() - 1.0);
        }
      }
    }
    const double lo = 0.1 * rng.uniform();
    const double hi = lo + 0.1 * rng.uniform();
    const Motif a = extract_motif(m, {.threshold = lo});
    const Motif b = extract_motif(m, {.threshold = hi});
    for (const auto& e : b.directed) EXPECT_TRUE(contains(a.directed, e));
    for (const auto& e : b.undirected) EXPECT_TRUE(contains(a.undirected, e));
  }
}

TEST(Motif, DotNamesOutcomes) {
  LongitudinalModel m = screening_zero();
  set_all(m, 1, 0, 0.6);
  m.B_within[1](2, 1) = 0.5;
  m.B_within[2](1, 2) = 0.5;
  m.B_within[3](2, 1) = 0.5;
  const std::string dot = motif_to_dot(extract_motif(m), m.schema);
  EXPECT_NE(dot.find("\"BMI\" -> \"SBP\""), std::string::npos) << dot;
  EXPECT_NE(dot.find("\"SBP\" -> \"DBP\" [dir=none]"), std::string::npos) << dot;
}
