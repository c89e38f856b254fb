#pragma once

#include <map>
#include <optional>
#include <string>

#include "wlingam/model.hpp"
#include "wlingam/motif.hpp"
#include "wlingam/serialize.hpp"
#include "wlingam/simulator.hpp"

namespace wlingam::app {

struct Response {
  int status = 200;
  std::string body;  // JSON, trailing newline
};

struct ServiceState {
  EffectBundle bundle;
  LongitudinalModel model;
  Motif motif;
  json manifest;
};

/// Loads bundle.json and model.json (and motif.json when present) from an
/// artifact directory. Throws wlingam::Error on missing or invalid files.
ServiceState load_state(const std::string& artifact_dir);

/// Transport-free request handler; every response is a pure function of the
/// loaded state and the request.
class Service {
 public:
  Service() = default;
  explicit Service(ServiceState state) : state_(std::move(state)) {}

  bool loaded() const noexcept { return state_.has_value(); }
  void load(ServiceState state) { state_ = std::move(state); }

  Response handle(const std::string& method, const std::string& path,
                  const std::map<std::string, std::string>& query, const std::string& body) const;

 private:
  Response meta() const;
  Response simulate(const std::string& body, SimMode mode) const;
  Response effects(const std::map<std::string, std::string>& query) const;
  Response motif() const;

  std::optional<ServiceState> state_;
};

struct ServeOptions {
  std::string artifact_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string cors_origin;  // empty disables CORS headers
};

/// Blocks serving HTTP until the process is stopped. /model/meta answers 503
/// until loading finishes.
int serve(const ServeOptions& options);

}  // namespace wlingam::app

namespace wlingam::app {

/// SimQuery from a request body. Throws Error(Parse) naming the first
/// missing or mistyped field.
SimQuery query_from_json(const json& body, SimMode mode);

/// Wire form of an answer, including the rendered message text.
json answer_to_json(const SimAnswer& answer, const SimQuery& query, const EffectBundle& bundle);

}  // namespace wlingam::app
