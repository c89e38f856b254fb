#include "wlingam/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

#include "wlingam/error.hpp"

namespace wlingam {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Intervention: return "intervention";
    case Role::Outcome: return "outcome";
    case Role::Exogenous: return "exogenous";
    case Role::BaselineOnly: return "baseline_only";
  }
  return "outcome";
}

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::Continuous: return "continuous";
    case ValueKind::Binary: return "binary";
    case ValueKind::Categorical: return "categorical";
  }
  return "continuous";
}

Role role_from_string(std::string_view s) {
  if (s == "intervention") return Role::Intervention;
  if (s == "outcome") return Role::Outcome;
  if (s == "exogenous") return Role::Exogenous;
  if (s == "baseline_only") return Role::BaselineOnly;
  throw Error(ErrorCode::Parse, "unknown role '" + std::string(s) + "'");
}

ValueKind kind_from_string(std::string_view s) {
  if (s == "continuous") return ValueKind::Continuous;
  if (s == "binary") return ValueKind::Binary;
  if (s == "categorical") return ValueKind::Categorical;
  throw Error(ErrorCode::Parse, "unknown value kind '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------

PanelSchema::PanelSchema(std::vector<Variable> variables, std::vector<int> time_labels)
    : variables_(std::move(variables)), time_labels_(std::move(time_labels)) {
  if (variables_.empty()) throw Error(ErrorCode::SchemaInvalid, "no variables declared");
  if (time_labels_.size() < 2) {
    throw Error(ErrorCode::SchemaInvalid, "at least two time points are required");
  }
  for (std::size_t t = 1; t < time_labels_.size(); ++t) {
    if (time_labels_[t] <= time_labels_[t - 1]) {
      throw Error(ErrorCode::SchemaInvalid, "time labels must be strictly increasing");
    }
  }

  std::set<std::string> seen;
  std::size_t n_intervention = 0;
  std::size_t n_outcome = 0;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const Variable& v = variables_[i];
    if (v.name.empty() || v.name.find_first_of(",\"\n\r") != std::string::npos) {
      throw Error(ErrorCode::SchemaInvalid, "invalid variable name '" + v.name + "'");
    }
    if (!seen.insert(v.name).second) {
      throw Error(ErrorCode::SchemaInvalid, "duplicate variable name '" + v.name + "'");
    }
    switch (v.role) {
      case Role::Intervention:
        ++n_intervention;
        intervention_ = i;
        if (v.kind != ValueKind::Binary) {
          throw Error(ErrorCode::SchemaInvalid, "intervention '" + v.name + "' must be binary");
        }
        break;
      case Role::Outcome:
        ++n_outcome;
        if (v.kind != ValueKind::Continuous) {
          throw Error(ErrorCode::SchemaInvalid, "outcome '" + v.name + "' must be continuous");
        }
        break;
      case Role::BaselineOnly:
        if (baseline_) {
          throw Error(ErrorCode::SchemaInvalid, "at most one baseline-only variable is supported");
        }
        baseline_ = i;
        break;
      case Role::Exogenous:
        break;
    }
  }
  if (n_intervention != 1) {
    throw Error(ErrorCode::SchemaInvalid, "exactly one intervention variable is required");
  }
  if (n_outcome == 0) throw Error(ErrorCode::SchemaInvalid, "no outcome variables declared");
}

std::optional<std::size_t> PanelSchema::find(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t PanelSchema::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw Error(ErrorCode::UnknownVariable, "unknown variable '" + std::string(name) + "'");
}

std::vector<std::size_t> PanelSchema::indices(Role role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].role == role) out.push_back(i);
  }
  return out;
}

bool PanelSchema::excluded_from_fit(std::size_t var, std::size_t t) const {
  const Role role = variables_.at(var).role;
  return (role == Role::Intervention && t == 0) || (role == Role::BaselineOnly && t > 0);
}

PanelSchema PanelSchema::paper_shaped() {
  using R = Role;
  using K = ValueKind;
  std::vector<Variable> vars = {
      {"Health-guidance", R::Intervention, K::Binary, "intervention"},
      {"BMI", R::Outcome, K::Continuous, "outcome"},
      {"SBP", R::Outcome, K::Continuous, "outcome"},
      {"DBP", R::Outcome, K::Continuous, "outcome"},
      {"HbA1c", R::Outcome, K::Continuous, "outcome"},
      {"LDL", R::Outcome, K::Continuous, "outcome"},
      {"Drug-HT", R::Exogenous, K::Binary, "medication"},
      {"Drug-DM", R::Exogenous, K::Binary, "medication"},
      {"Drug-LDL", R::Exogenous, K::Binary, "medication"},
      {"Smoke", R::Exogenous, K::Binary, "lifestyle"},
      {"Exercise", R::Exogenous, K::Binary, "lifestyle"},
      {"Alcohol", R::Exogenous, K::Binary, "lifestyle"},
      {"Age", R::Exogenous, K::Continuous, "background"},
      {"Sex", R::Exogenous, K::Binary, "background"},
      {"Check_num", R::BaselineOnly, K::Categorical, "baseline"},
  };
  return PanelSchema(std::move(vars), {2020, 2021, 2022, 2023});
}

// ---------------------------------------------------------------------------

Panel::Panel(PanelSchema schema, std::vector<std::string> subject_ids,
             std::vector<Eigen::MatrixXd> slices)
    : schema_(std::move(schema)), ids_(std::move(subject_ids)), slices_(std::move(slices)) {
  const auto n = static_cast<Eigen::Index>(ids_.size());
  const auto V = static_cast<Eigen::Index>(schema_.size());
  if (ids_.empty()) throw Error(ErrorCode::EmptyResult, "panel has no subjects");
  if (slices_.size() != schema_.time_points()) {
    throw Error(ErrorCode::DimensionMismatch, "slice count does not match schema time points");
  }
  for (const auto& s : slices_) {
    if (s.rows() != n || s.cols() != V) {
      throw Error(ErrorCode::DimensionMismatch, "slice shape does not match subjects x variables");
    }
    if (!s.allFinite()) throw Error(ErrorCode::NonNumeric, "panel contains non-finite values");
  }
  if (auto w = schema_.baseline()) {
    const auto col = static_cast<Eigen::Index>(*w);
    for (std::size_t t = 1; t < slices_.size(); ++t) slices_[t].col(col) = slices_[0].col(col);
  }
  for (std::size_t v = 0; v < schema_.size(); ++v) {
    if (schema_.variable(v).kind != ValueKind::Binary) continue;
    for (std::size_t t = 0; t < slices_.size(); ++t) {
      const auto c = slices_[t].col(static_cast<Eigen::Index>(v));
      for (Eigen::Index s = 0; s < n; ++s) {
        if (c[s] != 0.0 && c[s] != 1.0) {
          throw Error(ErrorCode::BinaryDomainViolation,
                      schema_.variable(v).name + "=" + std::to_string(c[s]) + " for subject '" +
                          ids_[static_cast<std::size_t>(s)] + "'");
        }
      }
    }
  }
}

const Eigen::MatrixXd& Panel::slice_time(std::size_t t) const {
  if (t >= slices_.size()) {
    throw Error(ErrorCode::OutOfRange, "time index " + std::to_string(t) + " outside [0, " +
                                           std::to_string(slices_.size()) + ")");
  }
  return slices_[t];
}

double Panel::at(std::size_t subject, std::size_t var, std::size_t t) const {
  const auto& s = slice_time(t);
  if (subject >= ids_.size() || var >= schema_.size()) {
    throw Error(ErrorCode::OutOfRange, "panel index out of range");
  }
  return s(static_cast<Eigen::Index>(subject), static_cast<Eigen::Index>(var));
}

Panel Panel::resample(std::span<const std::size_t> rows) const {
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  std::vector<Eigen::MatrixXd> slices(slices_.size(),
                                      Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()),
                                                      static_cast<Eigen::Index>(schema_.size())));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t r = rows[k];
    if (r >= ids_.size()) throw Error(ErrorCode::OutOfRange, "resample row out of range");
    ids.push_back(ids_[r] + "#" + std::to_string(k));
    for (std::size_t t = 0; t < slices_.size(); ++t) {
      slices[t].row(static_cast<Eigen::Index>(k)) = slices_[t].row(static_cast<Eigen::Index>(r));
    }
  }
  return Panel(schema_, std::move(ids), std::move(slices));
}

bool Panel::operator==(const Panel& other) const {
  if (!(schema_ == other.schema_) || ids_ != other.ids_ || slices_.size() != other.slices_.size()) {
    return false;
  }
  for (std::size_t t = 0; t < slices_.size(); ++t) {
    if (slices_[t].rows() != other.slices_[t].rows() || slices_[t] != other.slices_[t]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s, std::size_t line_no) {
  double value = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw Error(ErrorCode::NonNumeric,
                "line " + std::to_string(line_no) + ": '" + std::string(s) + "' is not a number");
  }
  return value;
}

std::size_t parse_index(std::string_view s, std::size_t line_no) {
  std::size_t value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::NonNumeric, "line " + std::to_string(line_no) + ": time_index '" +
                                           std::string(s) + "' is not a non-negative integer");
  }
  return value;
}

}  // namespace

IngestResult ingest_long_csv(std::istream& in, const PanelSchema& schema) {
  const std::size_t V = schema.size();
  const std::size_t T = schema.time_points();

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Parse, "missing header row");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
    line.erase(0, 3);
  }
  {
    auto header = split_csv_line(trim(line));
    const std::vector<std::string_view> expected = {"subject_id", "time_index", "variable", "value"};
    if (header.size() != expected.size() ||
        !std::equal(header.begin(), header.end(), expected.begin(),
                    [](std::string_view a, std::string_view b) { return trim(a) == b; })) {
      throw Error(ErrorCode::Parse, "header must be 'subject_id,time_index,variable,value'");
    }
  }

  std::unordered_map<std::string, std::size_t> name_index;
  for (std::size_t v = 0; v < V; ++v) name_index.emplace(schema.variable(v).name, v);

  struct SubjectCells {
    std::vector<double> values;   // [t * V + v]
    std::vector<char> present;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, SubjectCells> cells;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    auto fields = split_csv_line(row);
    if (fields.size() != 4) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected 4 fields");
    }
    const std::string id(trim(fields[0]));
    if (id.empty()) throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": empty subject_id");
    const std::size_t t = parse_index(trim(fields[1]), line_no);
    if (t >= T) {
      throw Error(ErrorCode::OutOfRange, "line " + std::to_string(line_no) + ": time_index " +
                                             std::to_string(t) + " outside [0, " + std::to_string(T) + ")");
    }
    const std::string var_name(trim(fields[2]));
    auto it = name_index.find(var_name);
    if (it == name_index.end()) {
      throw Error(ErrorCode::UnknownVariable,
                  "line " + std::to_string(line_no) + ": unknown variable '" + var_name + "'");
    }
    const std::size_t v = it->second;
    const double value = parse_double(trim(fields[3]), line_no);
    if (schema.variable(v).kind == ValueKind::Binary && value != 0.0 && value != 1.0) {
      throw Error(ErrorCode::BinaryDomainViolation, "line " + std::to_string(line_no) + ": " +
                                                        var_name + "=" + std::string(trim(fields[3])));
    }

    auto [pos, inserted] = cells.try_emplace(id);
    if (inserted) {
      order.push_back(id);
      pos->second.values.assign(T * V, 0.0);
      pos->second.present.assign(T * V, 0);
    }
    const std::size_t k = t * V + v;
    if (pos->second.present[k]) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": duplicate cell (" + id +
                                        ", " + std::to_string(t) + ", " + var_name + ")");
    }
    pos->second.values[k] = value;
    pos->second.present[k] = 1;
  }

  std::vector<std::string> kept;
  std::vector<std::string> dropped;
  for (const auto& id : order) {
    const auto& c = cells.at(id);
    bool complete = true;
    for (std::size_t t = 0; t < T && complete; ++t) {
      for (std::size_t v = 0; v < V; ++v) {
        if (!c.present[t * V + v] && !schema.excluded_from_fit(v, t)) {
          complete = false;
          break;
        }
      }
    }
    (complete ? kept : dropped).push_back(id);
  }
  if (kept.empty()) throw Error(ErrorCode::EmptyResult, "no complete subjects in input");

  const auto n = static_cast<Eigen::Index>(kept.size());
  std::vector<Eigen::MatrixXd> slices(T, Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(V)));
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto& c = cells.at(kept[static_cast<std::size_t>(s)]);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t v = 0; v < V; ++v) {
        slices[t](s, static_cast<Eigen::Index>(v)) = c.values[t * V + v];
      }
    }
  }
  const std::size_t n_dropped = dropped.size();
  return IngestResult{Panel(schema, std::move(kept), std::move(slices)), n_dropped, std::move(dropped)};
}

IngestResult ingest_long_csv(const std::string& path, const PanelSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return ingest_long_csv(in, schema);
}

void emit_long_csv(const Panel& panel, std::ostream& out) {
  const auto& schema = panel.schema();
  out << "subject_id,time_index,variable,value\n";
  char buf[64];
  for (std::size_t s = 0; s < panel.subjects(); ++s) {
    for (std::size_t t = 0; t < panel.time_points(); ++t) {
      const auto& slice = panel.slice_time(t);
      for (std::size_t v = 0; v < schema.size(); ++v) {
        const double value = slice(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(v));
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
        out << panel.subject_ids()[s] << ',' << t << ',' << schema.variable(v).name << ','
            << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << '\n';
      }
    }
  }
}

PanelSummary summarize(const Panel& panel) {
  PanelSummary out;
  out.subjects = panel.subjects();
  out.time_points = panel.time_points();
  out.person_years = out.subjects * out.time_points;
  const auto& schema = panel.schema();
  out.cells.resize(schema.size());
  const double n = static_cast<double>(panel.subjects());
  for (std::size_t v = 0; v < schema.size(); ++v) {
    for (std::size_t t = 0; t < panel.time_points(); ++t) {
      const auto col = panel.slice_time(t).col(static_cast<Eigen::Index>(v));
      VariableTimeSummary cell;
      cell.mean = col.mean();
      if (panel.subjects() > 1) {
        cell.sd = std::sqrt((col.array() - cell.mean).square().sum() / (n - 1.0));
      }
      if (schema.variable(v).kind == ValueKind::Binary) cell.prevalence = cell.mean;
      out.cells[v].push_back(cell);
    }
  }
  return out;
}

}  // namespace wlingam
