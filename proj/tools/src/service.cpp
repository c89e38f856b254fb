#include "wlingam/app/service.hpp"

#include <httplib.h>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "wlingam/error.hpp"
#include "wlingam/hash.hpp"

namespace wlingam::app {

namespace fs = std::filesystem;

namespace {

constexpr const char* kApiVersion = "v1";

Response reply(int status, json body) {
  body["apiVersion"] = kApiVersion;
  return {status, dump(body)};
}

Response error_reply(int status, const std::string& code, const std::string& message) {
  return reply(status, {{"error", {{"code", code}, {"message", message}}}});
}

std::string format_number(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

std::string render(std::string text, const std::map<std::string, std::string>& fields) {
  for (const auto& [key, value] : fields) {
    const std::string token = "{" + key + "}";
    for (auto pos = text.find(token); pos != std::string::npos; pos = text.find(token, pos + value.size())) {
      text.replace(pos, token.size(), value);
    }
  }
  return text;
}

json interval_json(const std::optional<Interval>& i) {
  if (!i) return nullptr;
  return {{"low", i->low}, {"high", i->high}};
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  return *v;
}

std::vector<std::size_t> parse_lags(const std::string& text) {
  std::vector<std::size_t> lags;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, end - start);
    std::size_t lag = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), lag);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error(ErrorCode::Parse, "lags must be a comma-separated list of non-negative integers");
    }
    lags.push_back(lag);
    start = end + 1;
  }
  return lags;
}

}  // namespace

SimQuery query_from_json(const json& body, SimMode mode) {
  if (!body.is_object()) throw Error(ErrorCode::Parse, "request body must be a JSON object");
  auto field = [&](const char* name) -> const json& {
    if (!body.contains(name)) throw Error(ErrorCode::Parse, std::string("missing field '") + name + "'");
    return body.at(name);
  };
  SimQuery q;
  q.mode = mode;
  const json& baseline = field("baseline");
  if (!baseline.is_object()) throw Error(ErrorCode::Parse, "'baseline' must be an object of numbers");
  for (const auto& [name, value] : baseline.items()) {
    if (!value.is_number()) throw Error(ErrorCode::Parse, "baseline value for '" + name + "' is not a number");
    q.baseline[name] = value.get<double>();
  }
  const json& source = field("source");
  const json& target = field("target");
  if (!source.is_string() || !target.is_string()) throw Error(ErrorCode::Parse, "'source' and 'target' must be strings");
  q.source = source.get<std::string>();
  q.target = target.get<std::string>();
  const json& horizon = field("horizon");
  if (!horizon.is_number_unsigned()) throw Error(ErrorCode::Parse, "'horizon' must be a non-negative integer");
  q.horizon = horizon.get<std::size_t>();
  const json& value = field(mode == SimMode::Forward ? "forwardValue" : "desiredTarget");
  if (!value.is_number()) throw Error(ErrorCode::Parse, "query value must be a number");
  q.value = value.get<double>();
  return q;
}

json answer_to_json(const SimAnswer& a, const SimQuery& q, const EffectBundle& bundle) {
  std::map<std::string, std::string> fields = {{"source", q.source},
                                               {"target", q.target},
                                               {"lag", std::to_string(q.horizon)},
                                               {"desired", format_number(q.value)},
                                               {"detail", a.detail}};
  if (a.value) fields["value"] = format_number(*a.value);
  if (a.gap) fields["gap"] = format_number(*a.gap);
  const auto it = bundle.messages.find(a.message);
  return {{"status", std::string(to_string(a.status))},
          {"value", optional_json(a.value)},
          {"interval", interval_json(a.interval)},
          {"predictedLevel", optional_json(a.predicted_level)},
          {"levelInterval", interval_json(a.level_interval)},
          {"baselineImpliedTarget", optional_json(a.baseline_implied_target)},
          {"gap", optional_json(a.gap)},
          {"message", a.message},
          {"text", it == bundle.messages.end() ? a.message : render(it->second, fields)},
          {"detail", a.detail}};
}

ServiceState load_state(const std::string& artifact_dir) {
  const fs::path dir(artifact_dir);
  ServiceState s{bundle_from_json(read_json_file((dir / "bundle.json").string())),
                 model_from_json(read_json_file((dir / "model.json").string())), Motif{}, json::object()};
  const fs::path motif = dir / "motif.json";
  s.motif = fs::exists(motif) ? motif_from_json(read_json_file(motif.string()), s.model.schema)
                              : extract_motif(s.model);
  const auto& p = s.model.provenance;
  s.manifest = {{"modelHash", s.bundle.model_hash},
                {"schemaHash", p.schema_hash},
                {"maskHash", p.mask_hash},
                {"panelHash", p.panel_hash},
                {"version", p.version}};
  return s;
}

Response Service::handle(const std::string& method, const std::string& path,
                         const std::map<std::string, std::string>& query, const std::string& body) const {
  const bool get = method == "GET";
  const bool post = method == "POST";
  if (path != "/model/meta" && path != "/simulate/forward" && path != "/simulate/goal" && path != "/effects" &&
      path != "/motif") {
    return error_reply(404, "NotFound", "no such endpoint: " + path);
  }
  if (!state_) return error_reply(503, "NotReady", "artifacts are still loading");
  if (path == "/model/meta" && get) return meta();
  if (path == "/simulate/forward" && post) return simulate(body, SimMode::Forward);
  if (path == "/simulate/goal" && post) return simulate(body, SimMode::GoalSeek);
  if (path == "/effects" && get) return effects(query);
  if (path == "/motif" && get) return motif();
  return error_reply(405, "MethodNotAllowed", method + " is not allowed on " + path);
}

Response Service::meta() const {
  const ServiceState& s = *state_;
  const PanelSchema& schema = s.model.schema;
  json vars = json::array();
  for (const auto& v : schema.variables()) {
    vars.push_back({{"name", v.name},
                    {"role", std::string(to_string(v.role))},
                    {"kind", std::string(to_string(v.kind))},
                    {"group", v.group}});
  }
  json bounds = json::object();
  for (const auto& [name, r] : s.bundle.bounds) bounds[name] = {{"low", r.low}, {"high", r.high}};
  return reply(200, {{"variables", vars},
                     {"timeLabels", schema.time_labels()},
                     {"anchorTime", s.bundle.anchor_time},
                     {"anchorLabel", s.bundle.anchor_label},
                     {"sources", s.bundle.sources},
                     {"targets", s.bundle.targets},
                     {"lags", s.bundle.lags},
                     {"profile", s.bundle.profile},
                     {"bounds", bounds},
                     {"ciLevel", s.bundle.ci_level},
                     {"messages", s.bundle.messages},
                     {"manifest", s.manifest}});
}

Response Service::simulate(const std::string& body, SimMode mode) const {
  json parsed = json::parse(body, nullptr, false);
  if (parsed.is_discarded()) return error_reply(400, "MalformedBody", "request body is not valid JSON");
  try {
    const SimQuery q = query_from_json(parsed, mode);
    const SimAnswer a = mode == SimMode::Forward ? forward_query(state_->bundle, q) : goal_seek(state_->bundle, q);
    return reply(200, answer_to_json(a, q, state_->bundle));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnknownVariable) return error_reply(422, "UnknownVariable", e.message());
    return error_reply(400, std::string(to_string(e.code())), e.message());
  }
}

Response Service::effects(const std::map<std::string, std::string>& query) const {
  const EffectBundle& b = state_->bundle;
  const auto source = query.find("source");
  const auto target = query.find("target");
  if (source == query.end() || target == query.end()) {
    return error_reply(400, "MissingParameter", "both 'source' and 'target' are required");
  }
  const auto s = b.source_index(source->second);
  const auto t = b.target_index(target->second);
  if (!s) return error_reply(422, "UnknownVariable", "unknown effect source '" + source->second + "'");
  if (!t) return error_reply(422, "UnknownVariable", "unknown effect target '" + target->second + "'");
  std::vector<std::size_t> lags = b.lags;
  if (const auto it = query.find("lags"); it != query.end()) {
    try {
      lags = parse_lags(it->second);
    } catch (const Error& e) {
      return error_reply(400, "Parse", e.message());
    }
  }
  json rows = json::array();
  for (std::size_t lag : lags) {
    const auto l = b.lag_index(lag);
    if (!l) return error_reply(400, "HorizonOutOfRange", "lag " + std::to_string(lag) + " is not in the bundle");
    const auto si = static_cast<Eigen::Index>(*s);
    const auto ti = static_cast<Eigen::Index>(*t);
    rows.push_back({{"lag", lag},
                    {"point", b.point[*l](si, ti)},
                    {"ciLow", b.ci_low[*l](si, ti)},
                    {"ciHigh", b.ci_high[*l](si, ti)},
                    {"includesZero", b.is_uncertain(*l, *s, *t)}});
  }
  return reply(200, {{"source", source->second}, {"target", target->second}, {"rows", rows}});
}

Response Service::motif() const {
  json j = motif_to_json(state_->motif, state_->model.schema);
  j.erase("format");
  return reply(200, std::move(j));
}

int serve(const ServeOptions& options) {
  // Swapped once when loading completes; requests hold their own reference.
  struct Holder {
    std::mutex mutex;
    std::shared_ptr<const Service> service = std::make_shared<Service>();
    std::shared_ptr<const Service> get() {
      std::lock_guard lock(mutex);
      return service;
    }
  };
  auto holder = std::make_shared<Holder>();
  httplib::Server server;
  const std::string origin = options.cors_origin;
  auto cors = [origin](httplib::Response& res) {
    if (origin.empty()) return;
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  };
  auto dispatch = [holder, cors](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const Response r = holder->get()->handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
    cors(res);
  };
  for (const char* path : {"/model/meta", "/simulate/forward", "/simulate/goal", "/effects", "/motif"}) {
    server.Get(path, dispatch);
    server.Post(path, dispatch);
  }
  server.Options(R"(.*)", [cors](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    cors(res);
  });
  server.set_error_handler([holder, cors](const httplib::Request& req, httplib::Response& res) {
    if (res.status != 404) return;
    const Response r = holder->get()->handle(req.method, req.path, {}, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
    cors(res);
  });

  // Loading happens after the socket is up so that early probes see 503.
  std::string load_error;
  std::atomic<bool> listen_returned = false;
  std::thread loader([&] {
    try {
      auto loaded = std::make_shared<const Service>(load_state(options.artifact_dir));
      std::lock_guard lock(holder->mutex);
      holder->service = std::move(loaded);
      std::cerr << "wlingam: artifacts loaded from " << options.artifact_dir << "\n";
    } catch (const std::exception& e) {
      load_error = e.what();
      std::cerr << "wlingam: cannot load artifacts: " << load_error << "\n";
      while (!server.is_running() && !listen_returned) std::this_thread::sleep_for(std::chrono::milliseconds(1));
      server.stop();
    }
  });
  std::cerr << "wlingam: listening on " << options.host << ":" << options.port << "\n";
  const bool ok = server.listen(options.host, options.port);
  listen_returned = true;
  loader.join();
  if (!load_error.empty()) return 2;
  return ok ? 0 : 2;
}

}  // namespace wlingam::app
