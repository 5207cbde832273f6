#include "critloop/manifest.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "critloop/errors.hpp"

namespace critloop {

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, digest, &length) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256 failed");
  }
  EVP_MD_CTX_free(ctx);
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kDigits[digest[i] >> 4]);
    out.push_back(kDigits[digest[i] & 0xf]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + file.string() + " for hashing");
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

void Manifest::add_input(const std::filesystem::path& file) {
  inputs[file.filename().string()] = sha256_file(file);
}

void Manifest::add_output(const std::filesystem::path& file) {
  outputs[file.filename().string()] = sha256_file(file);
}

std::filesystem::path Manifest::write(const std::filesystem::path& reports_dir) const {
  std::filesystem::create_directories(reports_dir);
  nlohmann::json j;
  j["command"] = command;
  if (step >= 0) j["step"] = step;
  j["config_sha256"] = config_sha256;
  j["seed"] = seed;
  j["resolved_endpoints"] = resolved_endpoints;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  std::string name = "manifest-" + command;
  if (step >= 0) name += "-" + std::to_string(step);
  name += ".json";
  const std::filesystem::path path = reports_dir / name;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  return path;
}

}  // namespace critloop
