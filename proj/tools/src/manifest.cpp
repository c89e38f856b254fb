#include "wlingam/app/manifest.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "wlingam/hash.hpp"
#include "wlingam/serialize.hpp"

namespace wlingam::app {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

nlohmann::json digests(const std::vector<std::pair<std::string, std::string>>& list) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& [name, hash] : list) a.push_back({{"name", name}, {"sha256", hash}});
  return a;
}

}  // namespace

RunManifest::RunManifest(std::string command) : command_(std::move(command)) {}

void RunManifest::add_input(const std::string& path) {
  inputs_.emplace_back(fs::path(path).filename().string(), sha256_file(path));
}

void RunManifest::add_input_text(const std::string& name, const std::string& content) {
  inputs_.emplace_back(name, sha256_hex(content));
}

std::string RunManifest::inputs_hash() const {
  const nlohmann::json j = {{"command", command_}, {"inputs", digests(inputs_)}, {"config", config_}};
  return sha256_hex(j.dump());
}

void RunManifest::add_output(const std::string& path) {
  outputs_.emplace_back(fs::path(path).filename().string(), sha256_file(path));
}

nlohmann::json RunManifest::to_json(bool with_timestamp) const {
  nlohmann::json j = {{"command", command_},
                      {"version", WLINGAM_VERSION},
                      {"inputs", digests(inputs_)},
                      {"outputs", digests(outputs_)},
                      {"config", config_},
                      {"inputsHash", inputs_hash()}};
  if (with_timestamp) j["timestamp"] = utc_now();
  return j;
}

void RunManifest::write(const std::string& dir) const {
  write_json_file((fs::path(dir) / (command_ + ".manifest.json")).string(), to_json());
}

}  // namespace wlingam::app
