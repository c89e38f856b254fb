#include <gtest/gtest.h>

#include <fstream>

#include "test_support.hpp"
#include "wlingam/error.hpp"
#include "wlingam/serialize.hpp"
#include "wlingam/synth.hpp"

using namespace wlingam;
namespace wt = wlingam::testing;

namespace {

void expect_same_bundle(const EffectBundle& a, const EffectBundle& b, double tol) {
  EXPECT_EQ(a.anchor_time, b.anchor_time);
  EXPECT_EQ(a.anchor_label, b.anchor_label);
  EXPECT_EQ(a.sources, b.sources);
  EXPECT_EQ(a.targets, b.targets);
  EXPECT_EQ(a.lags, b.lags);
  EXPECT_EQ(a.profile, b.profile);
  EXPECT_EQ(a.profile_kinds, b.profile_kinds);
  EXPECT_EQ(a.messages, b.messages);
  EXPECT_EQ(a.scales, b.scales);
  ASSERT_EQ(a.bounds.size(), b.bounds.size());
  for (const auto& [name, bound] : a.bounds) {
    ASSERT_TRUE(b.bounds.count(name)) << name;
    EXPECT_EQ(bound.low, b.bounds.at(name).low);
    EXPECT_EQ(bound.high, b.bounds.at(name).high);
  }
  ASSERT_EQ(a.point.size(), b.point.size());
  for (std::size_t l = 0; l < a.lags.size(); ++l) {
    EXPECT_LE((a.point[l] - b.point[l]).cwiseAbs().maxCoeff(), tol);
    EXPECT_LE((a.ci_low[l] - b.ci_low[l]).cwiseAbs().maxCoeff(), tol);
    EXPECT_LE((a.ci_high[l] - b.ci_high[l]).cwiseAbs().maxCoeff(), tol);
    EXPECT_TRUE(a.uncertain[l] == b.uncertain[l]) << "lag " << l;
    EXPECT_LE((a.offset[l] - b.offset[l]).cwiseAbs().maxCoeff(), tol) << "lag " << l;
    EXPECT_LE((a.gain[l] - b.gain[l]).cwiseAbs().maxCoeff(), tol) << "lag " << l;
  }
}

}  // namespace

TEST(Dump, SortedKeysAndTrailingNewline) {
  const std::string s = dump(json{{"b", 1}, {"a", 2}});
  EXPECT_EQ(s, "{\n  \"a\": 2,\n  \"b\": 1\n}\n");
}

TEST(Serialize, SchemaRoundTrip) {
  const PanelSchema s = PanelSchema::paper_shaped();
  EXPECT_EQ(schema_from_json(schema_to_json(s)), s);
  EXPECT_EQ(schema_hash(s), schema_hash(schema_from_json(schema_to_json(s))));
  EXPECT_NE(schema_hash(s), schema_hash(wt::make_schema(2, 2, 3, false)));
}

TEST(Serialize, MaskRoundTrip) {
  Philox rng(61, 0);
  for (int k = 0; k < 20; ++k) {
    const PanelSchema s = wt::make_schema(2 + rng.below(3), 1 + rng.below(3), 2 + rng.below(3), rng.bernoulli(0.5));
    const PKMask m = wt::random_admissible_mask(s, rng);
    EXPECT_EQ(mask_from_json(mask_to_json(m, s), s), m);
  }
}

TEST(Serialize, MaskForOtherSchemaRejected) {
  const PanelSchema s = PanelSchema::paper_shaped();
  const json j = mask_to_json(build_default_mask(s), s);
  try {
    mask_from_json(j, wt::make_schema(2, 2, 4, false));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Serialize, BlockOrderRoundTrip) {
  const PanelSchema s = PanelSchema::paper_shaped();
  const BlockOrder b = default_block_order(s);
  const BlockOrder back = block_order_from_json(block_order_to_json(b, s), s);
  EXPECT_EQ(build_default_mask(s, back), build_default_mask(s, b));
  EXPECT_EQ(back.tiers.size(), b.tiers.size());
}

TEST(Serialize, ModelRoundTripIsBitExact) {
  const GeneratorSpec spec = paper_shaped_spec(3000, 62);
  const LongitudinalModel m = fit(generate(spec).panel, *spec.mask);
  const json j = model_to_json(m);
  const LongitudinalModel back = model_from_json(j);
  EXPECT_EQ(dump(model_to_json(back)), dump(j));
  for (std::size_t t = 1; t < 4; ++t) {
    EXPECT_TRUE(back.B_within[t] == m.B_within[t]);
    EXPECT_TRUE(back.C_within[t] == m.C_within[t]);
    EXPECT_TRUE(back.intercepts[t] == m.intercepts[t]);
    EXPECT_EQ(back.ordering[t], m.ordering[t]);
  }
  EXPECT_EQ(back.provenance, m.provenance);
  EXPECT_EQ(j.at("format"), "wlingam.model/1");
}

TEST(Serialize, BundleRoundTrip) {
  Philox rng(63, 0);
  const EffectBundle b = wt::random_bundle(rng);
  const EffectBundle back = bundle_from_json(bundle_to_json(b));
  expect_same_bundle(back, b, 0.0);
  EXPECT_EQ(dump(bundle_to_json(back)), dump(bundle_to_json(b)));
}

TEST(Serialize, MotifRoundTrip) {
  const PanelSchema s = PanelSchema::paper_shaped();
  const Motif m{{{0, 1}, {0, 3}}, {{1, 2}}, 0.02, false};
  EXPECT_EQ(motif_from_json(motif_to_json(m, s), s), m);
}

TEST(Serialize, DrawsRoundTrip) {
  wt::TempDir dir;
  BootstrapSummary s;
  s.queries.resize(2);
  s.queries[0].draws = {1.0, -2.5, 1e-300};
  s.queries[1].draws = {0.1, 0.2, 0.3};
  write_draws(dir.file("draws.bin"), s);
  EXPECT_EQ(read_draws(dir.file("draws.bin")), (std::vector<double>{1.0, -2.5, 1e-300, 0.1, 0.2, 0.3}));
  EXPECT_EQ(std::filesystem::file_size(dir.file("draws.bin")), 48u);
}

TEST(Serialize, MalformedFilesAreParseErrors) {
  wt::TempDir dir;
  std::ofstream(dir.file("bad.json")) << "{ not json";
  try {
    read_json_file(dir.file("bad.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
  }
  try {
    model_from_json(json{{"format", "wlingam.model/1"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
  }
  try {
    read_json_file(dir.file("absent.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

TEST(Serialize, NodeLabels) {
  const PanelSchema s = PanelSchema::paper_shaped();
  EXPECT_EQ(node_label(s, {s.index_of("SBP"), 2}), "SBP@2022");
}

// The fixture bundle was assembled in numpy; rebuilding it from the fixture
// model and its intervals must give the same trajectory and flags.
TEST(Serialize, FixtureBundleMatchesBuildBundle) {
  const LongitudinalModel model = wt::guidance_model();
  const EffectBundle fixture = wt::guidance_bundle();
  BootstrapSummary summary;
  const auto queries = bundle_queries(model.schema, 1);
  std::size_t k = 0;
  for (std::size_t s = 0; s < fixture.sources.size(); ++s) {
    for (std::size_t l = 0; l < fixture.lags.size(); ++l) {
      for (std::size_t t = 0; t < fixture.targets.size(); ++t, ++k) {
        QuerySummary q;
        q.query = queries.at(k);
        const auto si = static_cast<Eigen::Index>(s), ti = static_cast<Eigen::Index>(t);
        q.point = fixture.point[l](si, ti);
        q.ci_low = fixture.ci_low[l](si, ti);
        q.ci_high = fixture.ci_high[l](si, ti);
        summary.queries.push_back(q);
      }
    }
  }
  ASSERT_EQ(k, queries.size());
  const EffectBundle built = build_bundle(model, summary, 1, default_bounds(model.schema));
  expect_same_bundle(built, fixture, 1e-9);
}
