#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace critloop {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& file);

// Reproducibility record written next to every command's outputs: the config
// hash, the seed, resolved endpoints (never API keys) and content hashes of
// all declared inputs and outputs. Contains no timestamps, so identical runs
// produce identical manifests.
struct Manifest {
  std::string command;
  int step = -1;  // rl-step only
  std::string config_sha256;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> resolved_endpoints;  // role -> url + model
  std::map<std::string, std::string> inputs;              // path -> sha256
  std::map<std::string, std::string> outputs;             // path -> sha256

  void add_input(const std::filesystem::path& file);
  void add_output(const std::filesystem::path& file);
  std::filesystem::path write(const std::filesystem::path& reports_dir) const;
};

}  // namespace critloop
