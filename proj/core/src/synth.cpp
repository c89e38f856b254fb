#include "wlingam/synth.hpp"

#include <cmath>

#include "wlingam/discovery.hpp"
#include "wlingam/error.hpp"
#include "wlingam/rng.hpp"

namespace wlingam {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Uniform: return "uniform";
    case NoiseKind::Laplace: return "laplace";
    case NoiseKind::MixtureGaussian: return "mixtureGaussian";
    case NoiseKind::Gaussian: return "gaussian";
  }
  return "uniform";
}

NoiseKind noise_kind_from_string(std::string_view s) {
  if (s == "uniform") return NoiseKind::Uniform;
  if (s == "laplace") return NoiseKind::Laplace;
  if (s == "mixtureGaussian") return NoiseKind::MixtureGaussian;
  if (s == "gaussian") return NoiseKind::Gaussian;
  throw Error(ErrorCode::InvalidArgument, "unknown noise distribution '" + std::string(s) + "'");
}

double noise_variance(const NoiseSpec& noise) { return noise.scale * noise.scale; }

namespace {

double draw_noise(Philox& rng, const NoiseSpec& noise) {
  const double s = noise.scale;
  switch (noise.kind) {
    case NoiseKind::Uniform: return std::sqrt(3.0) * s * (2.0 * rng.uniform() - 1.0);
    case NoiseKind::Laplace: return rng.laplace(s / std::sqrt(2.0));
    case NoiseKind::MixtureGaussian: {
      const double centre = rng.bernoulli(0.5) ? 0.8 * s : -0.8 * s;
      return centre + 0.6 * s * rng.normal();
    }
    case NoiseKind::Gaussian: return s * rng.normal();
  }
  return 0.0;
}

void require_admissible(const GeneratorSpec& spec) {
  const LongitudinalModel& m = spec.truth;
  const PanelSchema& schema = m.schema;
  const std::size_t T = schema.time_points();
  for (std::size_t t = 1; t < T; ++t) {
    if (!is_permutation_lower_triangular(m.B_within[t], m.ordering[t])) {
      throw Error(ErrorCode::NonAdmissibleModel,
                  "true within-time structure at t=" + std::to_string(t) + " contradicts its ordering");
    }
  }
  if (!spec.mask) return;
  const PKMask& mask = *spec.mask;
  const auto outcomes = schema.outcomes();
  const auto exogenous = schema.exogenous();
  const std::size_t v = schema.intervention();
  auto fail = [&](std::size_t t, std::size_t child, std::size_t parent, const char* block) {
    throw Error(ErrorCode::NonAdmissibleModel,
                std::string("true ") + block + " edge " + schema.variable(parent).name + " -> " +
                    schema.variable(child).name + " at t=" + std::to_string(t) + " is forbidden by the mask");
  };
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const std::size_t x = outcomes[i];
      if (m.alpha[t](r) != 0.0 && mask.within_at(t, x, v) == 0) fail(t, x, v, "alpha");
      for (std::size_t j = 0; j < outcomes.size(); ++j) {
        const auto c = static_cast<Eigen::Index>(j);
        if (m.B_within[t](r, c) != 0.0 && mask.within_at(t, x, outcomes[j]) == 0) fail(t, x, outcomes[j], "B_within");
        if (m.B_cross[t](r, c) != 0.0 && mask.cross_at(t, 1, x, outcomes[j]) == 0) fail(t, x, outcomes[j], "B_cross");
      }
      for (std::size_t k = 0; k < exogenous.size(); ++k) {
        const auto c = static_cast<Eigen::Index>(k);
        if (m.C_within[t](r, c) != 0.0 && mask.within_at(t, x, exogenous[k]) == 0) fail(t, x, exogenous[k], "C_within");
        if (m.C_cross[t](r, c) != 0.0 && mask.cross_at(t, 1, x, exogenous[k]) == 0) fail(t, x, exogenous[k], "C_cross");
      }
      if (t == 1 && schema.baseline() && m.delta(r) != 0.0 && mask.cross_at(1, 1, x, *schema.baseline()) == 0) {
        fail(t, x, *schema.baseline(), "delta");
      }
    }
  }
}

}  // namespace

Generated generate(const GeneratorSpec& spec) {
  const LongitudinalModel& m = spec.truth;
  const PanelSchema& schema = m.schema;
  const std::size_t T = schema.time_points();
  const std::size_t V = schema.size();
  const auto outcomes = schema.outcomes();
  const auto exogenous = schema.exogenous();
  const std::size_t p = outcomes.size();
  const std::size_t q = exogenous.size();
  const std::size_t v = schema.intervention();
  const auto w = schema.baseline();
  const std::size_t n = spec.subjects;

  if (spec.noise.size() != p || spec.initial_mean.size() != static_cast<Eigen::Index>(p) ||
      spec.initial_sd.size() != static_cast<Eigen::Index>(p)) {
    throw Error(ErrorCode::DimensionMismatch, "generator noise / initial-state sizes must match the outcome count");
  }
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "generator needs at least one subject");
  require_admissible(spec);

  std::vector<Eigen::MatrixXd> slices(T, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(V)));
  std::vector<std::string> ids(n);
  Philox rng(spec.seed, 0x53594E54ull);  // stream tag distinct from bootstrap replicates
  const ExogenousLaw& law = spec.law;
  const double rate_logit = std::log(law.intervention_rate / (1.0 - law.intervention_rate));

  Eigen::VectorXd x_prev(static_cast<Eigen::Index>(p)), z(static_cast<Eigen::Index>(q)), z_prev(static_cast<Eigen::Index>(q));
  for (std::size_t s = 0; s < n; ++s) {
    const auto row = static_cast<Eigen::Index>(s);
    ids[s] = "S" + std::to_string(s + 1);

    // t = 0: initial conditions
    for (std::size_t i = 0; i < p; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      x_prev(ii) = spec.initial_mean(ii) + spec.initial_sd(ii) * std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
      slices[0](row, static_cast<Eigen::Index>(outcomes[i])) = x_prev(ii);
    }
    for (std::size_t k = 0; k < q; ++k) {
      const Variable& var = schema.variable(exogenous[k]);
      double value = 0.0;
      switch (var.kind) {
        case ValueKind::Binary: value = rng.bernoulli(var.group == "background" ? 0.5 : law.binary_rate) ? 1.0 : 0.0; break;
        case ValueKind::Categorical: value = static_cast<double>(rng.below(static_cast<std::uint64_t>(law.levels))); break;
        case ValueKind::Continuous:
          value = var.group == "background"
                      ? std::floor(law.continuous_low + (law.continuous_high - law.continuous_low + 1.0) * rng.uniform())
                      : rng.normal();
          break;
      }
      z_prev(static_cast<Eigen::Index>(k)) = value;
      slices[0](row, static_cast<Eigen::Index>(exogenous[k])) = value;
    }
    double w0 = 0.0;
    if (w) {
      const Variable& var = schema.variable(*w);
      w0 = var.kind == ValueKind::Continuous ? rng.normal()
                                              : static_cast<double>(rng.below(static_cast<std::uint64_t>(law.levels)));
      for (std::size_t t = 0; t < T; ++t) slices[t](row, static_cast<Eigen::Index>(*w)) = w0;
    }

    for (std::size_t t = 1; t < T; ++t) {
      double prob = law.intervention_rate;
      if (law.logistic_assignment) {
        const double standardized = (x_prev(0) - spec.initial_mean(0)) / spec.initial_sd(0);
        prob = 1.0 / (1.0 + std::exp(-(rate_logit + law.logistic_slope * standardized)));
      }
      const double vt = rng.bernoulli(prob) ? 1.0 : 0.0;
      slices[t](row, static_cast<Eigen::Index>(v)) = vt;

      for (std::size_t k = 0; k < q; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        const Variable& var = schema.variable(exogenous[k]);
        double value = z_prev(kk);
        if (var.group == "background") {
          if (var.kind == ValueKind::Continuous) value += 1.0;
        } else if (var.kind == ValueKind::Binary) {
          if (!rng.bernoulli(law.persistence)) value = rng.bernoulli(law.binary_rate) ? 1.0 : 0.0;
        } else if (var.kind == ValueKind::Categorical) {
          value = static_cast<double>(rng.below(static_cast<std::uint64_t>(law.levels)));
        } else {
          value = 0.5 * value + rng.normal();
        }
        z(kk) = value;
        slices[t](row, static_cast<Eigen::Index>(exogenous[k])) = value;
      }

      Eigen::VectorXd rhs = m.intercepts[t] + m.alpha[t] * vt + m.B_cross[t] * x_prev + m.C_within[t] * z +
                            m.C_cross[t] * z_prev;
      if (t == 1 && w) rhs += m.delta * w0;
      for (std::size_t i = 0; i < p; ++i) rhs(static_cast<Eigen::Index>(i)) += draw_noise(rng, spec.noise[i]);
      Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
      for (std::size_t i : m.ordering[t]) {
        const auto c = static_cast<Eigen::Index>(i);
        x(c) = rhs(c) + m.B_within[t].row(c).dot(x);
      }
      for (std::size_t i = 0; i < p; ++i) slices[t](row, static_cast<Eigen::Index>(outcomes[i])) = x(static_cast<Eigen::Index>(i));
      x_prev = x;
      z_prev = z;
    }
  }

  Generated out{Panel(schema, std::move(ids), std::move(slices)), {}, false, {}};
  for (const auto& ns : spec.noise) {
    if (ns.kind == NoiseKind::Gaussian) out.non_identifiable = true;
  }
  if (out.non_identifiable) {
    out.warnings.push_back("NonIdentifiable: Gaussian errors leave the within-time ordering unidentified");
  }

  const StackedSystem sys = StackedSystem::build(m);
  const std::size_t source = sys.index({v, 1});
  const Eigen::VectorXd e = sys.effects_from(source);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t x : outcomes) {
      const std::size_t target = sys.index({x, t});
      out.true_effects.push_back({sys.nodes()[source], sys.nodes()[target], static_cast<std::ptrdiff_t>(t - 1),
                                  e(static_cast<Eigen::Index>(target))});
    }
  }
  return out;
}

namespace {

// Intercepts that put the no-input fixed point of each equation at `level`.
Eigen::VectorXd intercepts_for(const Eigen::MatrixXd& Bw, const Eigen::MatrixXd& Bc, const Eigen::VectorXd& level) {
  const auto p = level.size();
  return (Eigen::MatrixXd::Identity(p, p) - Bw - Bc) * level;
}

}  // namespace

GeneratorSpec paper_shaped_spec(std::size_t subjects, std::uint64_t seed) {
  const PanelSchema schema = PanelSchema::paper_shaped();
  LongitudinalModel truth = LongitudinalModel::zero(schema);
  // outcome-local: BMI 0, SBP 1, DBP 2, HbA1c 3, LDL 4
  // exogenous-local: Drug-HT 0, Drug-DM 1, Drug-LDL 2, Smoke 3, Exercise 4,
  //                  Alcohol 5, Age 6, Sex 7
  Eigen::VectorXd level(5);
  level << 24.0, 125.0, 78.0, 5.6, 120.0;
  for (std::size_t t = 1; t < schema.time_points(); ++t) {
    const double drift = 0.05 * static_cast<double>(t - 1);
    Eigen::MatrixXd& Bw = truth.B_within[t];
    Bw(1, 0) = 0.6;
    Bw(2, 1) = 0.5;
    Bw(2, 0) = 0.3;
    Bw(3, 0) = 0.4;
    Bw(4, 3) = 0.5 + drift;
    truth.ordering[t] = {0, 1, 3, 2, 4};

    Eigen::MatrixXd& Bc = truth.B_cross[t];
    Bc.diagonal().setConstant(0.6);
    Bc(1, 0) = 0.1;

    truth.alpha[t] << -0.3, -0.5, -0.2, -0.1, -0.2 + drift;

    Eigen::MatrixXd& Cw = truth.C_within[t];
    Cw(1, 0) = -0.8;
    Cw(2, 0) = -0.4;
    Cw(3, 1) = -0.5;
    Cw(4, 2) = -0.9;
    Cw(1, 3) = 0.2;
    Cw(0, 4) = -0.3;
    Cw(2, 5) = 0.3;
    Cw(1, 6) = 0.05;
    Cw(3, 6) = 0.01;
    Cw(0, 7) = 0.4;
    Cw(4, 7) = -0.3;

    Eigen::MatrixXd& Cc = truth.C_cross[t];
    Cc(1, 0) = 0.2;
    Cc(4, 3) = 0.1;
    Cc(0, 4) = -0.1;

    truth.intercepts[t] = intercepts_for(Bw, Bc, level);
  }
  truth.delta << 0.05, 0.0, 0.0, 0.02, 0.0;

  GeneratorSpec spec{.truth = truth};
  spec.noise.assign(5, NoiseSpec{NoiseKind::Uniform, 0.5});
  spec.initial_mean = level;
  spec.initial_sd = Eigen::VectorXd(5);
  spec.initial_sd << 2.0, 8.0, 6.0, 0.5, 15.0;
  spec.mask = build_default_mask(schema);
  spec.subjects = subjects;
  spec.seed = seed;
  return spec;
}

GeneratorSpec small_spec(std::size_t subjects, std::uint64_t seed) {
  PanelSchema schema({{"v", Role::Intervention, ValueKind::Binary, "intervention"},
                      {"x1", Role::Outcome, ValueKind::Continuous, "outcome"},
                      {"x2", Role::Outcome, ValueKind::Continuous, "outcome"},
                      {"z1", Role::Exogenous, ValueKind::Binary, "covariate"}},
                     {0, 1, 2});
  LongitudinalModel truth = LongitudinalModel::zero(schema);
  for (std::size_t t = 1; t < 3; ++t) {
    truth.alpha[t] << -0.5, -0.3;
    truth.B_within[t](1, 0) = 0.7;
    truth.ordering[t] = {0, 1};
    truth.B_cross[t].diagonal().setConstant(0.5);
    truth.C_within[t](0, 0) = 0.4;
    truth.intercepts[t] << 1.0, 2.0;
  }
  GeneratorSpec spec{.truth = truth};
  spec.noise.assign(2, NoiseSpec{NoiseKind::Uniform, 1.0});
  spec.initial_mean = Eigen::VectorXd::Zero(2);
  spec.initial_sd = Eigen::VectorXd::Ones(2);
  spec.mask = build_default_mask(schema);
  spec.subjects = subjects;
  spec.seed = seed;
  return spec;
}

GeneratorSpec named_spec(std::string_view name, std::size_t subjects, std::uint64_t seed) {
  if (name == "paper-shaped") return paper_shaped_spec(subjects, seed);
  if (name == "small") return small_spec(subjects, seed);
  throw Error(ErrorCode::InvalidArgument, "unknown generator spec '" + std::string(name) + "'");
}

}  // namespace wlingam
