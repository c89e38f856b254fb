#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace wlingam::app {

/// Audit record written next to every command's outputs. Only `timestamp`
/// varies between identical runs.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  /// Hashes the file content; the record keeps only the file name.
  void add_input(const std::string& path);
  void add_input_text(const std::string& name, const std::string& content);
  void set_config(nlohmann::json config) { config_ = std::move(config); }

  /// SHA-256 over the command, the input digests and the config. Artifacts
  /// embed it so that they can be matched to the run that produced them.
  std::string inputs_hash() const;

  void add_output(const std::string& path);
  /// Writes `<dir>/<command>.manifest.json`.
  void write(const std::string& dir) const;

  nlohmann::json to_json(bool with_timestamp = true) const;

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> outputs_;
  nlohmann::json config_ = nlohmann::json::object();
};

}  // namespace wlingam::app
