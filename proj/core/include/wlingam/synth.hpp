#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wlingam/effects.hpp"
#include "wlingam/mask.hpp"
#include "wlingam/model.hpp"
#include "wlingam/panel.hpp"

namespace wlingam {

enum class NoiseKind { Uniform, Laplace, MixtureGaussian, Gaussian };

std::string_view to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(std::string_view s);

/// Zero-mean error law with standard deviation `scale`.
///   Uniform          U[-sqrt(3) s, sqrt(3) s]
///   Laplace          Laplace(0, s / sqrt(2))
///   MixtureGaussian  0.5 N(-0.8 s', (0.6 s')^2) + 0.5 N(0.8 s', (0.6 s')^2), s' = s
///   Gaussian         N(0, s^2), unidentifiable; only for negative tests
struct NoiseSpec {
  NoiseKind kind = NoiseKind::Uniform;
  double scale = 1.0;
};

double noise_variance(const NoiseSpec& noise);

/// Sampling law for the intervention, exogenous inputs and baseline.
///   intervention     Bernoulli(intervention_rate) at t >= 1, 0 at t = 0;
///                    optionally logistic in the first outcome at t - 1
///   background       binary: constant; continuous: +1 per time point
///   other binary     Bernoulli(binary_rate), kept with prob. persistence
///   other continuous 0.5 * previous + N(0, 1)
///   categorical      uniform on {0, ..., levels - 1}
struct ExogenousLaw {
  double intervention_rate = 0.3;
  bool logistic_assignment = false;
  double logistic_slope = 1.0;
  double binary_rate = 0.3;
  double persistence = 0.5;
  double continuous_low = 40.0;
  double continuous_high = 74.0;
  int levels = 4;
};

struct GeneratorSpec {
  LongitudinalModel truth;
  std::vector<NoiseSpec> noise;        // per outcome
  Eigen::VectorXd initial_mean;        // x(0), per outcome
  Eigen::VectorXd initial_sd;          // x(0), per outcome (uniform law)
  ExogenousLaw law;
  std::optional<PKMask> mask;          // truth must respect it when present
  std::size_t subjects = 1000;
  std::uint64_t seed = 0;
};

struct Generated {
  Panel panel;
  /// Intervention at t = 1 on every outcome at t = 1 .. T-1, from the
  /// stacked system of the true model.
  std::vector<TotalEffect> true_effects;
  bool non_identifiable = false;
  std::vector<std::string> warnings;
};

/// Throws Error(NonAdmissibleModel) when the truth is not acyclic within
/// time or uses an edge the mask forbids.
Generated generate(const GeneratorSpec& spec);

/// 5 outcomes, 8 exogenous inputs, one baseline-only covariate, 4 time
/// points, uniform noise with sd 0.5.
GeneratorSpec paper_shaped_spec(std::size_t subjects, std::uint64_t seed);

/// 2 outcomes (x1 -> x2), 1 binary input, 3 time points, no baseline-only
/// variable. Small enough for path-enumeration checks (11 stacked nodes).
GeneratorSpec small_spec(std::size_t subjects, std::uint64_t seed);

/// Names accepted by the CLI: "paper-shaped", "small".
GeneratorSpec named_spec(std::string_view name, std::size_t subjects, std::uint64_t seed);

}  // namespace wlingam
