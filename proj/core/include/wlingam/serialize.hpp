#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "wlingam/bootstrap.hpp"
#include "wlingam/mask.hpp"
#include "wlingam/model.hpp"
#include "wlingam/motif.hpp"
#include "wlingam/panel.hpp"
#include "wlingam/simulator.hpp"
#include "wlingam/synth.hpp"

namespace wlingam {

using json = nlohmann::json;

/// Artifact files are pretty-printed with sorted keys and a trailing newline
/// so that identical content gives identical bytes.
std::string dump(const json& j);
void write_json_file(const std::string& path, const json& j);
json read_json_file(const std::string& path);

json schema_to_json(const PanelSchema& schema);
PanelSchema schema_from_json(const json& j);
std::string schema_hash(const PanelSchema& schema);

/// {convention, T, variables[], within[t][i][j], cross[t][lag][i][j]}
json mask_to_json(const PKMask& mask, const PanelSchema& schema);
/// Throws Error(DimensionMismatch) when the mask does not fit the schema.
PKMask mask_from_json(const json& j, const PanelSchema& schema);
std::string mask_hash(const PKMask& mask, const PanelSchema& schema);

json block_order_to_json(const BlockOrder& blocks, const PanelSchema& schema);
BlockOrder block_order_from_json(const json& j, const PanelSchema& schema);

json model_to_json(const LongitudinalModel& model);
LongitudinalModel model_from_json(const json& j);

json panel_meta_to_json(const Panel& panel, std::size_t dropped, const std::vector<std::string>& dropped_ids);
json summary_to_json(const PanelSummary& summary, const PanelSchema& schema);

std::string node_label(const PanelSchema& schema, const Node& node);

/// Config echo and per-query results; draws are written separately.
json bootstrap_to_json(const BootstrapSummary& summary, const PanelSchema& schema);
/// Query-major little-endian float64 array, one block of draws per query.
void write_draws(const std::string& path, const BootstrapSummary& summary);
std::vector<double> read_draws(const std::string& path);

json histograms_to_json(const BootstrapSummary& summary, const std::vector<Histogram>& hist,
                        const PanelSchema& schema);

json bundle_to_json(const EffectBundle& bundle);
EffectBundle bundle_from_json(const json& j);

json motif_to_json(const Motif& motif, const PanelSchema& schema);
Motif motif_from_json(const json& j, const PanelSchema& schema);

json truth_to_json(const GeneratorSpec& spec, const Generated& generated);

}  // namespace wlingam
