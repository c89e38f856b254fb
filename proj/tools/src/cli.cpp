#include "wlingam/app/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wlingam/app/manifest.hpp"
#include "wlingam/app/service.hpp"
#include "wlingam/bootstrap.hpp"
#include "wlingam/effects.hpp"
#include "wlingam/error.hpp"
#include "wlingam/fit.hpp"
#include "wlingam/hash.hpp"
#include "wlingam/mask.hpp"
#include "wlingam/motif.hpp"
#include "wlingam/serialize.hpp"
#include "wlingam/simulator.hpp"
#include "wlingam/synth.hpp"

namespace wlingam::app {

namespace fs = std::filesystem;

namespace {

// Error tagged with the flag or file it came from.
[[noreturn]] void rethrow_for(const std::string& flag, const Error& e) {
  throw Error(e.code(), flag + ": " + e.message());
}

template <typename F>
auto for_flag(const std::string& flag, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    rethrow_for(flag, e);
  }
}

std::string num(double v) { return json(v).dump(); }

std::string env_name(const std::string& flag) {
  std::string out = "WLINGAM_";
  for (char c : flag) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "--out: cannot create directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::string dir_of(const std::string& file) {
  const fs::path parent = fs::path(file).parent_path();
  return parent.empty() ? std::string(".") : parent.string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

json with_run(json artifact, const RunManifest& manifest, const std::string& command) {
  artifact["run"] = {{"command", command}, {"inputsHash", manifest.inputs_hash()}};
  return artifact;
}

// Schema from --schema, else schema.json next to `sibling`, else the
// embedded schema of a panel.meta.json there.
PanelSchema resolve_schema(const std::string& schema_path, const std::string& sibling, RunManifest& manifest) {
  std::string path = schema_path;
  if (path.empty()) {
    for (const char* name : {"schema.json", "panel.meta.json"}) {
      const std::string candidate = join(dir_of(sibling), name);
      if (fs::exists(candidate)) {
        path = candidate;
        break;
      }
    }
  }
  if (path.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "--schema: not given and no schema.json or panel.meta.json next to '" + sibling + "'");
  }
  return for_flag("--schema", [&] {
    json j = read_json_file(path);
    manifest.add_input(path);
    if (j.contains("schema")) j = j.at("schema");
    return schema_from_json(j);
  });
}

PanelSchema schema_or_preset(const std::string& schema_path, RunManifest& manifest) {
  if (schema_path.empty()) {
    manifest.add_input_text("preset:paper-shaped", "paper-shaped");
    return PanelSchema::paper_shaped();
  }
  return for_flag("--schema", [&] {
    json j = read_json_file(schema_path);
    manifest.add_input(schema_path);
    if (j.contains("schema")) j = j.at("schema");
    return schema_from_json(j);
  });
}

Panel load_panel(const std::string& path, const PanelSchema& schema, RunManifest& manifest) {
  return for_flag("--panel", [&] {
    IngestResult r = ingest_long_csv(path, schema);
    manifest.add_input(path);
    if (r.panel.subjects() == 0) throw Error(ErrorCode::EmptyResult, "no complete subjects in '" + path + "'");
    return std::move(r.panel);
  });
}

PKMask load_mask(const std::string& path, const PanelSchema& schema, RunManifest& manifest) {
  return for_flag("--mask", [&] {
    PKMask mask = mask_from_json(read_json_file(path), schema);
    manifest.add_input(path);
    const ValidationReport report = validate_mask(mask, schema);
    if (!report.ok()) {
      const Violation& v = report.violations.front();
      throw Error(ErrorCode::InvalidArgument, "'" + path + "' is not admissible: " +
                                                  std::string(to_string(v.kind)) + " " + v.detail);
    }
    return mask;
  });
}

LongitudinalModel load_model(const std::string& path, RunManifest& manifest) {
  return for_flag("--model", [&] {
    LongitudinalModel m = model_from_json(read_json_file(path));
    manifest.add_input(path);
    return m;
  });
}

std::string model_hash(const LongitudinalModel& model) { return sha256_hex(model_to_json(model).dump()); }

void check_format(const std::string& format) {
  if (format != "json" && format != "csv") {
    throw Error(ErrorCode::InvalidArgument, "--format: expected json or csv, got '" + format + "'");
  }
}

// --- subcommands ------------------------------------------------------------

struct IngestArgs {
  std::string input, schema, out, format = "json";
};

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
  check_format(a.format);
  RunManifest manifest("ingest");
  const PanelSchema schema = schema_or_preset(a.schema, manifest);
  IngestResult r = for_flag("--input", [&] {
    IngestResult res = ingest_long_csv(a.input, schema);
    manifest.add_input(a.input);
    return res;
  });
  ensure_dir(a.out);
  std::ostringstream csv;
  emit_long_csv(r.panel, csv);
  write_text(join(a.out, "panel.csv"), csv.str());
  json meta = panel_meta_to_json(r.panel, r.dropped, r.dropped_ids);
  meta["panelHash"] = panel_hash(r.panel);
  write_json_file(join(a.out, "panel.meta.json"), with_run(meta, manifest, "ingest"));
  write_json_file(join(a.out, "schema.json"), schema_to_json(schema));

  const PanelSummary summary = summarize(r.panel);
  std::string summary_file;
  if (a.format == "json") {
    summary_file = join(a.out, "summary.json");
    write_json_file(summary_file, with_run(summary_to_json(summary, schema), manifest, "ingest"));
  } else {
    summary_file = join(a.out, "summary.csv");
    std::ostringstream s;
    s << "variable,label,mean,sd,prevalence\n";
    for (std::size_t v = 0; v < schema.size(); ++v) {
      for (std::size_t t = 0; t < summary.time_points; ++t) {
        const auto& c = summary.cells[v][t];
        s << schema.variable(v).name << ',' << schema.time_labels()[t] << ',' << num(c.mean) << ',' << num(c.sd)
          << ',' << (c.prevalence ? num(*c.prevalence) : std::string()) << '\n';
      }
    }
    write_text(summary_file, s.str());
  }
  for (const char* f : {"panel.csv", "panel.meta.json", "schema.json"}) manifest.add_output(join(a.out, f));
  manifest.add_output(summary_file);
  manifest.write(a.out);
  out << "ingested " << r.panel.subjects() << " subjects (" << r.dropped << " dropped)\n";
  return 0;
}

struct MaskArgs {
  std::string schema, blocks, out, check;
};

int cmd_mask(const MaskArgs& a, std::ostream& out) {
  RunManifest manifest("mask");
  const PanelSchema schema = schema_or_preset(a.schema, manifest);
  if (!a.check.empty()) {
    const PKMask mask = for_flag("--check", [&] { return mask_from_json(read_json_file(a.check), schema); });
    const ValidationReport report = validate_mask(mask, schema);
    json violations = json::array();
    for (const auto& v : report.violations) {
      violations.push_back({{"kind", std::string(to_string(v.kind))},
                            {"t", v.t},
                            {"lag", v.lag},
                            {"child", schema.variable(v.child).name},
                            {"parent", schema.variable(v.parent).name},
                            {"detail", v.detail}});
    }
    out << dump({{"ok", report.ok()}, {"violations", violations}});
    return report.ok() ? 0 : 1;
  }
  if (a.out.empty()) throw Error(ErrorCode::InvalidArgument, "--out: required unless --check is given");
  BlockOrder blocks = a.blocks.empty() ? default_block_order(schema) : for_flag("--blocks", [&] {
    BlockOrder b = block_order_from_json(read_json_file(a.blocks), schema);
    manifest.add_input(a.blocks);
    return b;
  });
  const PKMask mask = for_flag("--blocks", [&] { return build_default_mask(schema, blocks); });
  ensure_dir(a.out);
  write_json_file(join(a.out, "mask.json"), mask_to_json(mask, schema));
  write_json_file(join(a.out, "blocks.json"), block_order_to_json(blocks, schema));
  manifest.add_output(join(a.out, "mask.json"));
  manifest.add_output(join(a.out, "blocks.json"));
  manifest.write(a.out);
  const EdgeCounts c = admissible_edge_count(mask);
  out << "mask: " << c.within_unknown << " unknown within-time, " << c.within_required << " required, "
      << c.cross_allowed << " cross-time edges admitted\n";
  return 0;
}

struct FitArgs {
  std::string panel, mask, schema, out;
  bool auxiliary = false;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
  RunManifest manifest("fit");
  const PanelSchema schema = resolve_schema(a.schema, a.panel, manifest);
  const Panel panel = load_panel(a.panel, schema, manifest);
  const PKMask mask = load_mask(a.mask, schema, manifest);
  manifest.set_config({{"auxiliary", a.auxiliary}});
  const LongitudinalModel model = fit(panel, mask, FitOptions{a.auxiliary, true});
  const std::string dir = a.out.empty() ? dir_of(a.panel) : a.out;
  ensure_dir(dir);
  const std::string path = join(dir, "model.json");
  write_json_file(path, with_run(model_to_json(model), manifest, "fit"));
  manifest.add_output(path);
  manifest.write(dir);
  out << "model written to " << path << " (" << model.audit.size() << " audit flags)\n";
  return 0;
}

struct EffectsArgs {
  std::string model, source, out, format = "csv", horizons;
  std::size_t anchor = 1;
  bool auxiliary = false;
};

std::vector<std::size_t> parse_horizons(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    long long v = -1;
    try {
      v = std::stoll(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || v < 0) {
      throw Error(ErrorCode::InvalidArgument, "--horizons: '" + item + "' is not a non-negative integer");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "--horizons: empty list");
  return out;
}

int cmd_effects(const EffectsArgs& a, std::ostream& out) {
  check_format(a.format);
  RunManifest manifest("effects");
  const LongitudinalModel model = load_model(a.model, manifest);
  const PanelSchema& schema = model.schema;
  const std::size_t T = schema.time_points();
  if (a.anchor < 1 || a.anchor >= T) {
    throw Error(ErrorCode::OutOfRange, "--anchor: " + std::to_string(a.anchor) + " is outside 1.." +
                                           std::to_string(T - 1));
  }
  std::vector<std::size_t> horizons;
  if (a.horizons.empty()) {
    for (std::size_t h = 0; a.anchor + h < T; ++h) horizons.push_back(h);
  } else {
    horizons = parse_horizons(a.horizons);
  }
  for (std::size_t h : horizons) {
    if (a.anchor + h >= T) {
      throw Error(ErrorCode::HorizonOutOfRange, "--horizons: horizon " + std::to_string(h) + " from anchor time " +
                                                    std::to_string(a.anchor) + " is past the last time point " +
                                                    std::to_string(T - 1));
    }
  }
  const std::size_t source =
      a.source.empty() ? schema.intervention() : for_flag("--source", [&] { return schema.index_of(a.source); });
  const StackedSystem sys = for_flag("--auxiliary", [&] { return StackedSystem::build(model, a.auxiliary); });
  if (!sys.find(Node{source, a.anchor})) {
    throw Error(ErrorCode::InvalidArgument, "--source: " + schema.variable(source).name + " has no node at time " +
                                                std::to_string(a.anchor));
  }
  manifest.set_config({{"anchor", a.anchor}, {"horizons", horizons}, {"source", schema.variable(source).name},
                       {"auxiliary", a.auxiliary}, {"format", a.format}});

  struct Row {
    std::string target;
    std::size_t lag;
    double estimate;
  };
  std::vector<Row> rows;
  for (std::size_t h : horizons) {
    for (std::size_t o : schema.outcomes()) {
      rows.push_back({schema.variable(o).name, h,
                      total_effect(sys, Node{source, a.anchor}, Node{o, a.anchor + h}).value});
    }
  }
  const std::string source_label = node_label(schema, Node{source, a.anchor});
  const std::string dir = a.out.empty() ? dir_of(a.model) : a.out;
  ensure_dir(dir);
  std::string path;
  if (a.format == "csv") {
    path = join(dir, "effects.csv");
    std::ostringstream s;
    s << "source,target,lag,estimate\n";
    for (const auto& r : rows) s << source_label << ',' << r.target << ',' << r.lag << ',' << num(r.estimate) << '\n';
    write_text(path, s.str());
  } else {
    path = join(dir, "effects.json");
    json list = json::array();
    for (const auto& r : rows) {
      list.push_back({{"source", source_label}, {"target", r.target}, {"lag", r.lag}, {"estimate", r.estimate}});
    }
    write_json_file(path, with_run({{"effects", list}, {"anchorLabel", schema.time_labels()[a.anchor]}}, manifest,
                                   "effects"));
  }
  manifest.add_output(path);
  manifest.write(dir);
  out << rows.size() << " effects written to " << path << "\n";
  return 0;
}

struct BootstrapArgs {
  std::string panel, mask, schema, out, bounds, format = "json";
  std::size_t B = 1000, workers = 1, anchor = 1, bins = 30;
  std::uint64_t seed = 0;
  double ci_level = 0.95;
  bool auxiliary = false;
};

std::map<std::string, Bounds> load_bounds(const std::string& path, const PanelSchema& schema,
                                          RunManifest& manifest) {
  std::map<std::string, Bounds> bounds = default_bounds(schema);
  if (path.empty()) return bounds;
  return for_flag("--bounds", [&] {
    const json j = read_json_file(path);
    manifest.add_input(path);
    for (const auto& [name, r] : j.items()) {
      schema.index_of(name);
      const Bounds b{r.at(0).get<double>(), r.at(1).get<double>()};
      if (!(b.low <= b.high)) throw Error(ErrorCode::InvalidArgument, "bounds for '" + name + "' are inverted");
      bounds[name] = b;
    }
    return bounds;
  });
}

int cmd_bootstrap(const BootstrapArgs& a, std::ostream& out) {
  check_format(a.format);
  if (a.B < 1) throw Error(ErrorCode::InvalidArgument, "--B: must be at least 1");
  if (!(a.ci_level > 0.0 && a.ci_level < 1.0)) throw Error(ErrorCode::InvalidArgument, "--ci-level: must be in (0, 1)");
  if (a.workers < 1) throw Error(ErrorCode::InvalidArgument, "--workers: must be at least 1");
  if (a.bins < 1) throw Error(ErrorCode::InvalidArgument, "--bins: must be at least 1");
  RunManifest manifest("bootstrap");
  const PanelSchema schema = resolve_schema(a.schema, a.panel, manifest);
  if (a.anchor < 1 || a.anchor >= schema.time_points()) {
    throw Error(ErrorCode::OutOfRange, "--anchor: " + std::to_string(a.anchor) + " is outside the modeled range");
  }
  const Panel panel = load_panel(a.panel, schema, manifest);
  const PKMask mask = load_mask(a.mask, schema, manifest);
  auto bounds = load_bounds(a.bounds, schema, manifest);
  // workers is deliberately absent: output does not depend on it
  manifest.set_config({{"B", a.B}, {"seed", a.seed}, {"ciLevel", a.ci_level}, {"anchor", a.anchor},
                       {"auxiliary", a.auxiliary}, {"bins", a.bins}, {"format", a.format}});

  const LongitudinalModel model = fit(panel, mask, FitOptions{a.auxiliary, true});
  const BootstrapConfig config{a.B, a.seed, a.ci_level, a.workers, a.auxiliary};
  const BootstrapSummary summary = run_bootstrap(panel, mask, config, bundle_queries(schema, a.anchor), model);
  EffectBundle bundle = build_bundle(model, summary, a.anchor, std::move(bounds));
  bundle.model_hash = model_hash(model);

  const std::string dir = a.out.empty() ? dir_of(a.panel) : a.out;
  ensure_dir(dir);
  const std::string summary_path = join(dir, "bootstrap.json");
  write_json_file(summary_path, with_run(bootstrap_to_json(summary, schema), manifest, "bootstrap"));
  write_draws(join(dir, "draws.bin"), summary);
  write_json_file(join(dir, "histograms.json"),
                  with_run({{"histograms", histograms_to_json(summary, histogram_export(summary, a.bins), schema)}},
                           manifest, "bootstrap"));
  write_json_file(join(dir, "bundle.json"), with_run(bundle_to_json(bundle), manifest, "bootstrap"));
  for (const char* f : {"bootstrap.json", "draws.bin", "histograms.json", "bundle.json"}) {
    manifest.add_output(join(dir, f));
  }
  if (a.format == "csv") {
    std::ostringstream s;
    s << "source,target,lag,point,ci_low,ci_high,includes_zero\n";
    for (const auto& q : summary.queries) {
      s << node_label(schema, q.query.source) << ',' << node_label(schema, q.query.target) << ','
        << (q.query.target.time - q.query.source.time) << ',' << num(q.point) << ',' << num(q.ci_low) << ','
        << num(q.ci_high) << ',' << (q.includes_zero ? "true" : "false") << '\n';
    }
    write_text(join(dir, "bootstrap.csv"), s.str());
    manifest.add_output(join(dir, "bootstrap.csv"));
  }
  manifest.write(dir);
  for (const auto& w : summary.warnings) out << "warning: " << w << "\n";
  out << summary.queries.size() << " effects bootstrapped over " << a.B << " replicates ("
      << summary.excluded_replicates.size() << " excluded)\n";
  return 0;
}

struct MotifArgs {
  std::string model, out;
  double threshold = 0.01;
  bool raw = false;
};

int cmd_motif(const MotifArgs& a, std::ostream& out) {
  RunManifest manifest("motif");
  const LongitudinalModel model = load_model(a.model, manifest);
  manifest.set_config({{"threshold", a.threshold}, {"standardized", !a.raw}});
  const Motif motif = for_flag("--threshold", [&] { return extract_motif(model, MotifOptions{a.threshold, !a.raw}); });
  const std::string dir = a.out.empty() ? dir_of(a.model) : a.out;
  ensure_dir(dir);
  write_json_file(join(dir, "motif.json"), with_run(motif_to_json(motif, model.schema), manifest, "motif"));
  write_text(join(dir, "motif.dot"), motif_to_dot(motif, model.schema));
  manifest.add_output(join(dir, "motif.json"));
  manifest.add_output(join(dir, "motif.dot"));
  manifest.write(dir);
  out << "motif: " << motif.directed.size() << " directed, " << motif.undirected.size() << " undirected edges\n";
  return 0;
}

struct SimulateArgs {
  std::string bundle, mode = "forward", source, target, baseline;
  std::vector<std::string> set;
  std::size_t horizon = 0;
  double value = 0.0;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  if (a.mode != "forward" && a.mode != "goal") {
    throw Error(ErrorCode::InvalidArgument, "--mode: expected forward or goal, got '" + a.mode + "'");
  }
  const EffectBundle bundle = for_flag("--bundle", [&] { return bundle_from_json(read_json_file(a.bundle)); });
  SimQuery q;
  q.mode = a.mode == "forward" ? SimMode::Forward : SimMode::GoalSeek;
  q.source = a.source;
  q.target = a.target;
  q.horizon = a.horizon;
  q.value = a.value;
  if (!a.baseline.empty()) {
    for_flag("--baseline", [&] {
      const json j = read_json_file(a.baseline);
      if (!j.is_object()) throw Error(ErrorCode::Parse, "expected an object of numbers");
      for (const auto& [name, v] : j.items()) {
        if (!v.is_number()) throw Error(ErrorCode::Parse, "value for '" + name + "' is not a number");
        q.baseline[name] = v.get<double>();
      }
    });
  }
  for (const auto& item : a.set) {
    const auto eq = item.find('=');
    std::size_t pos = 0;
    double v = 0.0;
    bool ok = eq != std::string::npos && eq > 0;
    if (ok) {
      try {
        v = std::stod(item.substr(eq + 1), &pos);
        ok = pos == item.size() - eq - 1;
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) throw Error(ErrorCode::InvalidArgument, "--set: expected NAME=VALUE, got '" + item + "'");
    q.baseline[item.substr(0, eq)] = v;
  }
  const SimAnswer answer = q.mode == SimMode::Forward ? forward_query(bundle, q) : goal_seek(bundle, q);
  out << dump(answer_to_json(answer, q, bundle));
  return 0;
}

struct SynthArgs {
  std::string spec = "paper-shaped", out;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  if (a.n < 1) throw Error(ErrorCode::InvalidArgument, "--n: must be at least 1");
  RunManifest manifest("synth");
  manifest.set_config({{"spec", a.spec}, {"n", a.n}, {"seed", a.seed}});
  const GeneratorSpec spec = for_flag("--spec", [&] { return named_spec(a.spec, a.n, a.seed); });
  const Generated g = generate(spec);
  const PanelSchema& schema = spec.truth.schema;
  ensure_dir(a.out);
  std::ostringstream csv;
  emit_long_csv(g.panel, csv);
  write_text(join(a.out, "panel.csv"), csv.str());
  write_json_file(join(a.out, "schema.json"), schema_to_json(schema));
  const PKMask mask = spec.mask ? *spec.mask : build_default_mask(schema);
  write_json_file(join(a.out, "mask.json"), mask_to_json(mask, schema));
  write_json_file(join(a.out, "truth.json"), with_run(truth_to_json(spec, g), manifest, "synth"));
  json meta = panel_meta_to_json(g.panel, 0, {});
  meta["panelHash"] = panel_hash(g.panel);
  write_json_file(join(a.out, "panel.meta.json"), with_run(meta, manifest, "synth"));
  for (const char* f : {"panel.csv", "schema.json", "mask.json", "truth.json", "panel.meta.json"}) {
    manifest.add_output(join(a.out, f));
  }
  manifest.write(a.out);
  for (const auto& w : g.warnings) out << "warning: " << w << "\n";
  out << "generated " << g.panel.subjects() << " subjects into " << a.out << "\n";
  return 0;
}

int report(const Error& e, std::ostream& err) {
  err << "wlingam: " << e.what() << "\n";
  return is_validation_error(e.code()) ? 1 : 2;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Workflow-constrained longitudinal LiNGAM toolkit", "wlingam"};
  app.set_version_flag("--version", std::string(WLINGAM_VERSION));
  app.require_subcommand(1);

  auto opt = [](CLI::App* sub, const std::string& flag, auto& target, const std::string& help) {
    return sub->add_option("--" + flag, target, help)->envname(env_name(flag));
  };
  auto flag = [](CLI::App* sub, const std::string& name, bool& target, const std::string& help) {
    return sub->add_flag("--" + name, target, help)->envname(env_name(name));
  };

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Read a long-format CSV into a complete-case panel");
  opt(c_ingest, "input", ingest.input, "long-format CSV")->required()->check(CLI::ExistingFile);
  opt(c_ingest, "schema", ingest.schema, "schema.json (default: 15-variable screening layout)");
  opt(c_ingest, "out", ingest.out, "output directory")->required();
  opt(c_ingest, "format", ingest.format, "summary format: json|csv");

  MaskArgs mask;
  auto* c_mask = app.add_subcommand("mask", "Build or check a prior-knowledge mask");
  opt(c_mask, "schema", mask.schema, "schema.json (default: 15-variable screening layout)");
  opt(c_mask, "blocks", mask.blocks, "block order JSON (default: derived from roles and groups)");
  opt(c_mask, "out", mask.out, "output directory");
  opt(c_mask, "check", mask.check, "validate this mask.json instead of building one");

  FitArgs fitargs;
  auto* c_fit = app.add_subcommand("fit", "Fit the constrained longitudinal model");
  opt(c_fit, "panel", fitargs.panel, "panel CSV")->required()->check(CLI::ExistingFile);
  opt(c_fit, "mask", fitargs.mask, "mask.json")->required()->check(CLI::ExistingFile);
  opt(c_fit, "schema", fitargs.schema, "schema.json (default: next to the panel)");
  opt(c_fit, "out", fitargs.out, "output directory (default: panel directory)");
  flag(c_fit, "auxiliary", fitargs.auxiliary, "also fit equations of the exogenous inputs");

  EffectsArgs effects;
  auto* c_effects = app.add_subcommand("effects", "Lagged total effects from a fitted model");
  opt(c_effects, "model", effects.model, "model.json")->required()->check(CLI::ExistingFile);
  opt(c_effects, "anchor", effects.anchor, "time index of the source node");
  opt(c_effects, "horizons", effects.horizons, "comma-separated lags (default: all that fit)");
  opt(c_effects, "source", effects.source, "source variable (default: the intervention)");
  opt(c_effects, "out", effects.out, "output directory (default: model directory)");
  opt(c_effects, "format", effects.format, "json|csv");
  flag(c_effects, "auxiliary", effects.auxiliary, "propagate through fitted exogenous equations");

  BootstrapArgs boot;
  auto* c_boot = app.add_subcommand("bootstrap", "Subject-level bootstrap of the lagged effects");
  opt(c_boot, "panel", boot.panel, "panel CSV")->required()->check(CLI::ExistingFile);
  opt(c_boot, "mask", boot.mask, "mask.json")->required()->check(CLI::ExistingFile);
  opt(c_boot, "schema", boot.schema, "schema.json (default: next to the panel)");
  opt(c_boot, "B", boot.B, "replicates");
  opt(c_boot, "seed", boot.seed, "random seed");
  opt(c_boot, "ci-level", boot.ci_level, "confidence level");
  opt(c_boot, "workers", boot.workers, "worker threads (output does not depend on it)");
  opt(c_boot, "anchor", boot.anchor, "time index of the intervention node");
  opt(c_boot, "bins", boot.bins, "histogram bins");
  opt(c_boot, "bounds", boot.bounds, "plausibility bounds JSON {name: [low, high]}");
  opt(c_boot, "out", boot.out, "output directory (default: panel directory)");
  opt(c_boot, "format", boot.format, "json|csv (csv adds bootstrap.csv)");
  flag(c_boot, "auxiliary", boot.auxiliary, "propagate through fitted exogenous equations");

  MotifArgs motif;
  auto* c_motif = app.add_subcommand("motif", "Recurring within-time structure");
  opt(c_motif, "model", motif.model, "model.json")->required()->check(CLI::ExistingFile);
  opt(c_motif, "threshold", motif.threshold, "edge presence threshold");
  flag(c_motif, "raw", motif.raw, "threshold raw instead of standardized coefficients");
  opt(c_motif, "out", motif.out, "output directory (default: model directory)");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Forward or goal-seeking query against a bundle");
  opt(c_sim, "bundle", sim.bundle, "bundle.json")->required()->check(CLI::ExistingFile);
  opt(c_sim, "mode", sim.mode, "forward|goal");
  opt(c_sim, "source", sim.source, "variable to change")->required();
  opt(c_sim, "target", sim.target, "outcome to read")->required();
  opt(c_sim, "horizon", sim.horizon, "lag")->required();
  opt(c_sim, "value", sim.value, "new source value (forward) or desired target (goal)")->required();
  opt(c_sim, "baseline", sim.baseline, "JSON object with the current-visit profile");
  c_sim->add_option("--set", sim.set, "NAME=VALUE profile entry, repeatable");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic panel with known truth");
  opt(c_synth, "spec", synth.spec, "paper-shaped|small");
  opt(c_synth, "n", synth.n, "subjects");
  opt(c_synth, "seed", synth.seed, "random seed");
  opt(c_synth, "out", synth.out, "output directory")->required();

  ServeOptions serve_opts;
  auto* c_serve = app.add_subcommand("serve", "HTTP service over an artifact directory");
  opt(c_serve, "artifact-dir", serve_opts.artifact_dir, "directory with bundle.json and model.json")
      ->required()
      ->check(CLI::ExistingDirectory);
  opt(c_serve, "host", serve_opts.host, "listen address");
  opt(c_serve, "port", serve_opts.port, "listen port");
  opt(c_serve, "cors-origin", serve_opts.cors_origin, "allowed browser origin");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << WLINGAM_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "wlingam: " << e.what() << "\n";
    return 1;
  }

  try {
    if (c_ingest->parsed()) return cmd_ingest(ingest, out);
    if (c_mask->parsed()) return cmd_mask(mask, out);
    if (c_fit->parsed()) return cmd_fit(fitargs, out);
    if (c_effects->parsed()) return cmd_effects(effects, out);
    if (c_boot->parsed()) return cmd_bootstrap(boot, out);
    if (c_motif->parsed()) return cmd_motif(motif, out);
    if (c_sim->parsed()) return cmd_simulate(sim, out);
    if (c_synth->parsed()) return cmd_synth(synth, out);
    if (c_serve->parsed()) return serve(serve_opts);
  } catch (const Error& e) {
    return report(e, err);
  } catch (const std::exception& e) {
    err << "wlingam: error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace wlingam::app
