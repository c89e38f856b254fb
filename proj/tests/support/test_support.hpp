#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "wlingam/mask.hpp"
#include "wlingam/model.hpp"
#include "wlingam/panel.hpp"
#include "wlingam/rng.hpp"
#include "wlingam/simulator.hpp"

namespace wlingam::testing {

std::string fixture_path(const std::string& relative);

/// Guidance-effect fixture (see fixtures/guidance/make_fixture.py).
LongitudinalModel guidance_model();
EffectBundle guidance_bundle();
/// 15 blocks of 1000 draws: lag-major, then outcome order.
std::vector<double> guidance_draws();

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::string& path);

/// Schema with one intervention, `p` outcomes, `q` exogenous inputs (first
/// half binary) and optionally a baseline-only covariate.
PanelSchema make_schema(std::size_t p, std::size_t q, std::size_t T, bool baseline);

/// Default mask with within-time outcome pairs randomly forbidden, a few
/// required (always acyclic), and cross-time entries randomly dropped.
PKMask random_admissible_mask(const PanelSchema& schema, Philox& rng);

/// Panel with independent uniform continuous cells and Bernoulli binary cells.
Panel random_panel(const PanelSchema& schema, std::size_t n, Philox& rng);

/// Random bundle for guardrail sweeps: random effect cells (some intervals
/// straddling zero, some tiny points), random affine trajectories.
EffectBundle random_bundle(Philox& rng);

/// Baseline profile inside the bundle's bounds.
std::map<std::string, double> random_baseline(const EffectBundle& bundle, Philox& rng);

}  // namespace wlingam::testing
