#include "wlingam/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "wlingam/error.hpp"
#include "wlingam/hash.hpp"

namespace wlingam {

namespace {

template <typename Derived>
json matrix_to_json(const Eigen::DenseBase<Derived>& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw Error(ErrorCode::DimensionMismatch, "matrix has wrong row count");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::DimensionMismatch, "matrix has wrong column count");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

IntMatrix int_matrix_from_json(const json& j, Eigen::Index n) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    throw Error(ErrorCode::DimensionMismatch, "mask matrix has wrong row count");
  }
  IntMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw Error(ErrorCode::DimensionMismatch, "mask matrix has wrong column count");
    }
    for (Eigen::Index c = 0; c < n; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<int>();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j, Eigen::Index n) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    throw Error(ErrorCode::DimensionMismatch, "vector has wrong length");
  }
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed ") + what + ": " + e.what());
  }
}

std::vector<std::string> names_of(const PanelSchema& schema, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (std::size_t i : idx) out.push_back(schema.variable(i).name);
  return out;
}

}  // namespace

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << dump(j);
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, "'" + path + "' is not valid JSON: " + e.what());
  }
}

// --- schema ---------------------------------------------------------------

json schema_to_json(const PanelSchema& schema) {
  json vars = json::array();
  for (const auto& v : schema.variables()) {
    vars.push_back({{"name", v.name},
                    {"role", std::string(to_string(v.role))},
                    {"kind", std::string(to_string(v.kind))},
                    {"group", v.group}});
  }
  return {{"variables", vars}, {"timeLabels", schema.time_labels()}};
}

PanelSchema schema_from_json(const json& j) {
  return guarded("schema", [&] {
    std::vector<Variable> vars;
    for (const auto& v : j.at("variables")) {
      vars.push_back({v.at("name").get<std::string>(), role_from_string(v.at("role").get<std::string>()),
                      kind_from_string(v.at("kind").get<std::string>()), v.value("group", std::string())});
    }
    return PanelSchema(std::move(vars), j.at("timeLabels").get<std::vector<int>>());
  });
}

std::string schema_hash(const PanelSchema& schema) { return sha256_hex(schema_to_json(schema).dump()); }

// --- mask -----------------------------------------------------------------

json mask_to_json(const PKMask& mask, const PanelSchema& schema) {
  json within = json::array();
  json cross = json::array();
  for (std::size_t t = 0; t < mask.time_points; ++t) {
    within.push_back(matrix_to_json(mask.within[t]));
    json lags = json::array();
    for (const auto& m : mask.cross[t]) lags.push_back(matrix_to_json(m));
    cross.push_back(std::move(lags));
  }
  json vars = json::array();
  for (const auto& v : schema.variables()) vars.push_back(v.name);
  return {{"convention", "row=child,column=parent"},
          {"T", mask.time_points},
          {"variables", vars},
          {"within", within},
          {"cross", cross}};
}

PKMask mask_from_json(const json& j, const PanelSchema& schema) {
  return guarded("mask", [&] {
    const std::size_t T = j.at("T").get<std::size_t>();
    const auto names = j.at("variables").get<std::vector<std::string>>();
    if (T != schema.time_points() || names.size() != schema.size()) {
      throw Error(ErrorCode::DimensionMismatch, "mask dimensions do not match schema");
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] != schema.variable(i).name) {
        throw Error(ErrorCode::DimensionMismatch, "mask variable order differs from schema at '" + names[i] + "'");
      }
    }
    if (j.value("convention", std::string()) != "row=child,column=parent") {
      throw Error(ErrorCode::Parse, "unsupported mask convention");
    }
    PKMask mask = PKMask::forbidden(schema.size(), T);
    const auto V = static_cast<Eigen::Index>(schema.size());
    const json& within = j.at("within");
    const json& cross = j.at("cross");
    if (within.size() != T || cross.size() != T) throw Error(ErrorCode::DimensionMismatch, "mask has wrong time count");
    for (std::size_t t = 0; t < T; ++t) {
      mask.within[t] = int_matrix_from_json(within[t], V);
      if (cross[t].size() != T) throw Error(ErrorCode::DimensionMismatch, "mask has wrong lag count");
      for (std::size_t lag = 0; lag < T; ++lag) mask.cross[t][lag] = int_matrix_from_json(cross[t][lag], V);
    }
    return mask;
  });
}

std::string mask_hash(const PKMask& mask, const PanelSchema& schema) {
  return sha256_hex(mask_to_json(mask, schema).dump());
}

json block_order_to_json(const BlockOrder& blocks, const PanelSchema& schema) {
  json tiers = json::array();
  for (const auto& tier : blocks.tiers) {
    json t = json::array();
    for (const auto& b : tier) {
      t.push_back({{"name", b.name}, {"kind", std::string(to_string(b.kind))}, {"members", names_of(schema, b.members)}});
    }
    tiers.push_back(std::move(t));
  }
  return {{"tiers", tiers}};
}

BlockOrder block_order_from_json(const json& j, const PanelSchema& schema) {
  return guarded("block order", [&] {
    BlockOrder order;
    for (const auto& tier : j.at("tiers")) {
      std::vector<Block> blocks;
      for (const auto& b : tier) {
        Block block{b.at("name").get<std::string>(), block_kind_from_string(b.at("kind").get<std::string>()), {}};
        for (const auto& name : b.at("members")) block.members.push_back(schema.index_of(name.get<std::string>()));
        blocks.push_back(std::move(block));
      }
      order.tiers.push_back(std::move(blocks));
    }
    return order;
  });
}

// --- model ----------------------------------------------------------------

json model_to_json(const LongitudinalModel& m) {
  const PanelSchema& schema = m.schema;
  const auto outcomes = schema.outcomes();
  json equations = json::array();
  for (std::size_t t = 1; t < m.time_points(); ++t) {
    std::vector<std::string> order;
    for (std::size_t i : m.ordering[t]) order.push_back(schema.variable(outcomes[i]).name);
    equations.push_back({{"t", t},
                         {"label", schema.time_labels()[t]},
                         {"ordering", order},
                         {"alpha", vector_to_json(m.alpha[t])},
                         {"B_within", matrix_to_json(m.B_within[t])},
                         {"B_cross", matrix_to_json(m.B_cross[t])},
                         {"C_within", matrix_to_json(m.C_within[t])},
                         {"C_cross", matrix_to_json(m.C_cross[t])},
                         {"intercepts", vector_to_json(m.intercepts[t])},
                         {"residualVariance", vector_to_json(m.residual_variance[t])}});
  }
  json scales = json::array();
  for (const auto& s : m.scales) scales.push_back(vector_to_json(s));
  json audit = json::array();
  for (const auto& a : m.audit) {
    audit.push_back({{"t", a.t}, {"equation", a.equation}, {"column", a.column}, {"code", a.code}});
  }
  json aux = nullptr;
  if (m.auxiliary) {
    const AuxiliaryEquations& x = *m.auxiliary;
    json eqs = json::array();
    for (std::size_t t = 1; t < m.time_points(); ++t) {
      eqs.push_back({{"t", t},
                     {"v_within", vector_to_json(x.v_within[t])},
                     {"v_cross", vector_to_json(x.v_cross[t])},
                     {"z_within", matrix_to_json(x.z_within[t])},
                     {"z_cross", matrix_to_json(x.z_cross[t])},
                     {"x_cross", matrix_to_json(x.x_cross[t])},
                     {"intercepts", vector_to_json(x.intercepts[t])}});
    }
    aux = {{"equations", eqs}, {"w", vector_to_json(x.w)}};
  }
  return {{"format", "wlingam.model/1"},
          {"schema", schema_to_json(schema)},
          {"outcomes", names_of(schema, outcomes)},
          {"exogenous", names_of(schema, schema.exogenous())},
          {"equations", equations},
          {"delta", vector_to_json(m.delta)},
          {"scales", scales},
          {"audit", audit},
          {"auxiliary", aux},
          {"provenance",
           {{"schemaHash", m.provenance.schema_hash},
            {"maskHash", m.provenance.mask_hash},
            {"panelHash", m.provenance.panel_hash},
            {"version", m.provenance.version}}}};
}

LongitudinalModel model_from_json(const json& j) {
  return guarded("model", [&] {
    if (j.value("format", std::string()) != "wlingam.model/1") {
      throw Error(ErrorCode::Parse, "not a model artifact");
    }
    LongitudinalModel m = LongitudinalModel::zero(schema_from_json(j.at("schema")));
    const auto p = static_cast<Eigen::Index>(m.p());
    const auto q = static_cast<Eigen::Index>(m.q());
    const auto V = static_cast<Eigen::Index>(m.schema.size());
    const auto outcomes = m.schema.outcomes();
    const json& eqs = j.at("equations");
    if (eqs.size() + 1 != m.time_points()) throw Error(ErrorCode::DimensionMismatch, "model has wrong equation count");
    for (std::size_t t = 1; t < m.time_points(); ++t) {
      const json& e = eqs[t - 1];
      m.alpha[t] = vector_from_json(e.at("alpha"), p);
      m.B_within[t] = matrix_from_json(e.at("B_within"), p, p);
      m.B_cross[t] = matrix_from_json(e.at("B_cross"), p, p);
      m.C_within[t] = matrix_from_json(e.at("C_within"), p, q);
      m.C_cross[t] = matrix_from_json(e.at("C_cross"), p, q);
      m.intercepts[t] = vector_from_json(e.at("intercepts"), p);
      m.residual_variance[t] = vector_from_json(e.at("residualVariance"), p);
      m.ordering[t].clear();
      for (const auto& name : e.at("ordering")) {
        const std::size_t var = m.schema.index_of(name.get<std::string>());
        const auto it = std::find(outcomes.begin(), outcomes.end(), var);
        if (it == outcomes.end()) throw Error(ErrorCode::Parse, "ordering names a non-outcome variable");
        m.ordering[t].push_back(static_cast<std::size_t>(it - outcomes.begin()));
      }
      if (m.ordering[t].size() != outcomes.size()) throw Error(ErrorCode::Parse, "ordering is incomplete");
    }
    m.delta = vector_from_json(j.at("delta"), p);
    const json& scales = j.at("scales");
    if (scales.size() != m.time_points()) throw Error(ErrorCode::DimensionMismatch, "model has wrong scale count");
    for (std::size_t t = 0; t < m.time_points(); ++t) m.scales[t] = vector_from_json(scales[t], V);
    for (const auto& a : j.at("audit")) {
      m.audit.push_back({a.at("t").get<std::size_t>(), a.at("equation").get<std::string>(),
                         a.at("column").get<std::string>(), a.at("code").get<std::string>()});
    }
    const json& aux = j.at("auxiliary");
    if (!aux.is_null()) {
      AuxiliaryEquations x;
      for (std::size_t t = 0; t < m.time_points(); ++t) {
        const Eigen::Index qq = t == 0 ? 0 : q;
        x.v_within.push_back(Eigen::VectorXd::Zero(qq));
        x.v_cross.push_back(Eigen::VectorXd::Zero(qq));
        x.z_within.push_back(Eigen::MatrixXd::Zero(qq, qq));
        x.z_cross.push_back(Eigen::MatrixXd::Zero(qq, qq));
        x.x_cross.push_back(Eigen::MatrixXd::Zero(qq, t == 0 ? 0 : p));
        x.intercepts.push_back(Eigen::VectorXd::Zero(qq));
      }
      const json& aeqs = aux.at("equations");
      if (aeqs.size() + 1 != m.time_points()) throw Error(ErrorCode::DimensionMismatch, "auxiliary equation count");
      for (std::size_t t = 1; t < m.time_points(); ++t) {
        const json& e = aeqs[t - 1];
        x.v_within[t] = vector_from_json(e.at("v_within"), q);
        x.v_cross[t] = vector_from_json(e.at("v_cross"), q);
        x.z_within[t] = matrix_from_json(e.at("z_within"), q, q);
        x.z_cross[t] = matrix_from_json(e.at("z_cross"), q, q);
        x.x_cross[t] = matrix_from_json(e.at("x_cross"), q, p);
        x.intercepts[t] = vector_from_json(e.at("intercepts"), q);
      }
      x.w = vector_from_json(aux.at("w"), q);
      m.auxiliary = std::move(x);
    }
    const json& prov = j.at("provenance");
    m.provenance.schema_hash = prov.value("schemaHash", std::string());
    m.provenance.mask_hash = prov.value("maskHash", std::string());
    m.provenance.panel_hash = prov.value("panelHash", std::string());
    m.provenance.version = prov.value("version", std::string());
    return m;
  });
}

// --- panel ----------------------------------------------------------------

json panel_meta_to_json(const Panel& panel, std::size_t dropped, const std::vector<std::string>& dropped_ids) {
  return {{"schema", schema_to_json(panel.schema())},
          {"subjects", panel.subjects()},
          {"timePoints", panel.time_points()},
          {"personYears", panel.subjects() * panel.time_points()},
          {"dropped", dropped},
          {"droppedIds", dropped_ids},
          {"panelHash", ""}};
}

json summary_to_json(const PanelSummary& summary, const PanelSchema& schema) {
  json vars = json::array();
  for (std::size_t v = 0; v < schema.size(); ++v) {
    json cells = json::array();
    for (std::size_t t = 0; t < summary.time_points; ++t) {
      const auto& c = summary.cells[v][t];
      json cell = {{"label", schema.time_labels()[t]}, {"mean", c.mean}, {"sd", c.sd}};
      if (c.prevalence) cell["prevalence"] = *c.prevalence;
      cells.push_back(std::move(cell));
    }
    vars.push_back({{"name", schema.variable(v).name}, {"cells", cells}});
  }
  return {{"subjects", summary.subjects},
          {"timePoints", summary.time_points},
          {"personYears", summary.person_years},
          {"variables", vars}};
}

// --- bootstrap ------------------------------------------------------------

std::string node_label(const PanelSchema& schema, const Node& node) {
  return schema.variable(node.var).name + "@" + std::to_string(schema.time_labels().at(node.time));
}

json bootstrap_to_json(const BootstrapSummary& summary, const PanelSchema& schema) {
  json queries = json::array();
  for (const auto& q : summary.queries) {
    queries.push_back({{"source", schema.variable(q.query.source.var).name},
                       {"sourceTime", q.query.source.time},
                       {"target", schema.variable(q.query.target.var).name},
                       {"targetTime", q.query.target.time},
                       {"lag", static_cast<long long>(q.query.target.time) - static_cast<long long>(q.query.source.time)},
                       {"point", q.point},
                       {"ciLow", q.ci_low},
                       {"ciHigh", q.ci_high},
                       {"includesZero", q.includes_zero},
                       {"excludedReplicates", summary.excluded_replicates.size()},
                       {"draws", q.draws.size()}});
  }
  const auto& c = summary.config;
  return {{"format", "wlingam.bootstrap/1"},
          {"config",
           {{"B", c.B}, {"seed", c.seed}, {"ciLevel", c.ci_level}, {"includeAuxiliary", c.include_auxiliary},
            {"quantileRule", "type7"}}},
          {"excludedReplicates", summary.excluded_replicates.size()},
          {"excludedReplicateIds", summary.excluded_replicates},
          {"warnings", summary.warnings},
          {"queries", queries},
          {"draws", {{"file", "draws.bin"}, {"layout", "query-major float64 little-endian"}}}};
}

void write_draws(const std::string& path, const BootstrapSummary& summary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  for (const auto& q : summary.queries) {
    for (double d : q.draws) {
      std::uint64_t bits = std::bit_cast<std::uint64_t>(d);
      unsigned char bytes[8];
      for (int k = 0; k < 8; ++k) bytes[k] = static_cast<unsigned char>(bits >> (8 * k));
      out.write(reinterpret_cast<const char*>(bytes), 8);
    }
  }
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

std::vector<double> read_draws(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path + "'");
  std::vector<double> out;
  unsigned char bytes[8];
  while (in.read(reinterpret_cast<char*>(bytes), 8)) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
    out.push_back(std::bit_cast<double>(bits));
  }
  if (in.gcount() != 0) throw Error(ErrorCode::Parse, "'" + path + "' is not a whole number of float64 values");
  return out;
}

json histograms_to_json(const BootstrapSummary& summary, const std::vector<Histogram>& hist,
                        const PanelSchema& schema) {
  json out = json::array();
  for (std::size_t k = 0; k < hist.size(); ++k) {
    const auto& q = summary.queries[k].query;
    const auto& h = hist[k];
    out.push_back({{"source", node_label(schema, q.source)},
                   {"target", node_label(schema, q.target)},
                   {"min", h.min},
                   {"max", h.max},
                   {"width", h.width},
                   {"counts", h.counts},
                   {"markers", {{"ciLow", h.ci_low}, {"ciHigh", h.ci_high}, {"zero", 0.0}, {"zeroInRange", h.zero_in_range}}}});
  }
  return out;
}

// --- bundle ---------------------------------------------------------------

json bundle_to_json(const EffectBundle& b) {
  json point = json::array(), low = json::array(), high = json::array(), unc = json::array();
  json offset = json::array(), gain = json::array();
  for (std::size_t l = 0; l < b.lags.size(); ++l) {
    point.push_back(matrix_to_json(b.point[l]));
    low.push_back(matrix_to_json(b.ci_low[l]));
    high.push_back(matrix_to_json(b.ci_high[l]));
    json u = json::array();
    for (Eigen::Index i = 0; i < b.uncertain[l].rows(); ++i) {
      json row = json::array();
      for (Eigen::Index c = 0; c < b.uncertain[l].cols(); ++c) row.push_back(b.uncertain[l](i, c) != 0);
      u.push_back(std::move(row));
    }
    unc.push_back(std::move(u));
    offset.push_back(vector_to_json(b.offset[l]));
    gain.push_back(matrix_to_json(b.gain[l]));
  }
  json profile = json::array();
  for (std::size_t k = 0; k < b.profile.size(); ++k) {
    profile.push_back({{"name", b.profile[k]}, {"kind", std::string(to_string(b.profile_kinds[k]))}});
  }
  json bounds = json::object();
  for (const auto& [name, r] : b.bounds) bounds[name] = {r.low, r.high};
  return {{"format", "wlingam.bundle/1"},
          {"index", "[lag][source][target]"},
          {"anchorTime", b.anchor_time},
          {"anchorLabel", b.anchor_label},
          {"ciLevel", b.ci_level},
          {"sources", b.sources},
          {"targets", b.targets},
          {"lags", b.lags},
          {"point", point},
          {"ciLow", low},
          {"ciHigh", high},
          {"uncertain", unc},
          {"profile", profile},
          {"trajectory", {{"offset", offset}, {"gain", gain}}},
          {"scales", b.scales},
          {"bounds", bounds},
          {"messages", b.messages},
          {"provenance", {{"modelHash", b.model_hash}}}};
}

EffectBundle bundle_from_json(const json& j) {
  return guarded("bundle", [&] {
    if (j.value("format", std::string()) != "wlingam.bundle/1") throw Error(ErrorCode::Parse, "not a bundle artifact");
    EffectBundle b;
    b.anchor_time = j.at("anchorTime").get<std::size_t>();
    b.anchor_label = j.at("anchorLabel").get<int>();
    b.ci_level = j.at("ciLevel").get<double>();
    b.sources = j.at("sources").get<std::vector<std::string>>();
    b.targets = j.at("targets").get<std::vector<std::string>>();
    b.lags = j.at("lags").get<std::vector<std::size_t>>();
    for (const auto& p : j.at("profile")) {
      b.profile.push_back(p.at("name").get<std::string>());
      b.profile_kinds.push_back(kind_from_string(p.at("kind").get<std::string>()));
    }
    const auto ns = static_cast<Eigen::Index>(b.sources.size());
    const auto nt = static_cast<Eigen::Index>(b.targets.size());
    const auto np = static_cast<Eigen::Index>(b.profile.size());
    const std::size_t L = b.lags.size();
    const json& point = j.at("point");
    const json& low = j.at("ciLow");
    const json& high = j.at("ciHigh");
    const json& traj = j.at("trajectory");
    if (point.size() != L || low.size() != L || high.size() != L || traj.at("offset").size() != L ||
        traj.at("gain").size() != L) {
      throw Error(ErrorCode::DimensionMismatch, "bundle matrices do not match the lag list");
    }
    for (std::size_t l = 0; l < L; ++l) {
      b.point.push_back(matrix_from_json(point[l], ns, nt));
      b.ci_low.push_back(matrix_from_json(low[l], ns, nt));
      b.ci_high.push_back(matrix_from_json(high[l], ns, nt));
      b.offset.push_back(vector_from_json(traj.at("offset")[l], nt));
      b.gain.push_back(matrix_from_json(traj.at("gain")[l], nt, np));
    }
    // flags are derived, never trusted from the file
    refresh_uncertainty(b);
    b.scales = j.at("scales").get<std::map<std::string, double>>();
    for (const auto& [name, r] : j.at("bounds").items()) b.bounds[name] = {r.at(0).get<double>(), r.at(1).get<double>()};
    b.messages = j.at("messages").get<std::map<std::string, std::string>>();
    b.model_hash = j.at("provenance").value("modelHash", std::string());
    return b;
  });
}

// --- motif ----------------------------------------------------------------

json motif_to_json(const Motif& motif, const PanelSchema& schema) {
  const auto outcomes = schema.outcomes();
  auto edges = [&](const std::vector<MotifEdge>& list) {
    json a = json::array();
    for (const auto& e : list) {
      a.push_back({schema.variable(outcomes.at(e.from)).name, schema.variable(outcomes.at(e.to)).name});
    }
    return a;
  };
  return {{"format", "wlingam.motif/1"},
          {"directed", edges(motif.directed)},
          {"undirected", edges(motif.undirected)},
          {"threshold", motif.threshold},
          {"scale", motif.standardized ? "standardized" : "raw"}};
}

Motif motif_from_json(const json& j, const PanelSchema& schema) {
  return guarded("motif", [&] {
    const auto outcomes = schema.outcomes();
    auto local = [&](const json& name) {
      const std::size_t var = schema.index_of(name.get<std::string>());
      const auto it = std::find(outcomes.begin(), outcomes.end(), var);
      if (it == outcomes.end()) throw Error(ErrorCode::Parse, "motif edge names a non-outcome variable");
      return static_cast<std::size_t>(it - outcomes.begin());
    };
    Motif m;
    for (const auto& e : j.at("directed")) m.directed.push_back({local(e.at(0)), local(e.at(1))});
    for (const auto& e : j.at("undirected")) m.undirected.push_back({local(e.at(0)), local(e.at(1))});
    m.threshold = j.at("threshold").get<double>();
    m.standardized = j.at("scale").get<std::string>() == "standardized";
    return m;
  });
}

// --- synth ----------------------------------------------------------------

json truth_to_json(const GeneratorSpec& spec, const Generated& generated) {
  const PanelSchema& schema = spec.truth.schema;
  json effects = json::array();
  for (const auto& e : generated.true_effects) {
    effects.push_back({{"source", node_label(schema, e.source)},
                       {"target", node_label(schema, e.target)},
                       {"lag", e.lag},
                       {"value", e.value}});
  }
  json noise = json::array();
  const auto outcomes = schema.outcomes();
  for (std::size_t i = 0; i < spec.noise.size(); ++i) {
    noise.push_back({{"variable", schema.variable(outcomes[i]).name},
                     {"distribution", std::string(to_string(spec.noise[i].kind))},
                     {"scale", spec.noise[i].scale}});
  }
  return {{"format", "wlingam.truth/1"},
          {"model", model_to_json(spec.truth)},
          {"noise", noise},
          {"subjects", spec.subjects},
          {"seed", spec.seed},
          {"nonIdentifiable", generated.non_identifiable},
          {"warnings", generated.warnings},
          {"trueEffects", effects}};
}

}  // namespace wlingam
