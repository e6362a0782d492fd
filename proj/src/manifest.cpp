#include "perclab/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace perclab {

namespace {

std::string sha1_hex(std::string_view header, std::string_view content) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), header.data(), header.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), content.data(), content.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw std::runtime_error("SHA-1 computation failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace

std::string git_blob_sha1(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  return sha1_hex(header, content);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string file_blob_sha1(const std::string& path) { return git_blob_sha1(read_file(path)); }

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string experiment_id(const std::string& command, const std::string& config) {
  return git_blob_sha1(command + "\n" + config).substr(0, 16);
}

std::string combined_input_hash(const std::string& config, const std::vector<InputFile>& inputs) {
  std::string listing = "config " + git_blob_sha1(config) + "\n";
  for (const auto& in : inputs) listing += in.key + " " + in.sha1 + "\n";
  return git_blob_sha1(listing);
}

OutputFile describe_output(const std::string& path) {
  const auto content = read_file(path);
  return {path, git_blob_sha1(content), content.size()};
}

std::string manifest_path(const std::string& output_path) { return output_path + ".manifest.json"; }

void write_manifest(const ExperimentRecord& r, const std::string& path) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["command"] = r.command;
  j["config"] = r.config;
  j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& in : r.inputs) j["inputs"].push_back({{"key", in.key}, {"path", in.path}, {"sha1", in.sha1}});
  j["input_hash"] = r.input_hash;
  j["started"] = r.started;
  j["finished"] = r.finished;
  j["outputs"] = nlohmann::ordered_json::array();
  for (const auto& o : r.outputs) j["outputs"].push_back({{"path", o.path}, {"sha1", o.sha1}, {"bytes", o.bytes}});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest '" + path + "'");
  out << j.dump(2) << "\n";
}

ExperimentRecord read_manifest(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
    ExperimentRecord r;
    r.id = j.at("id").get<std::string>();
    r.command = j.at("command").get<std::string>();
    r.config = j.at("config").get<std::string>();
    for (const auto& in : j.at("inputs"))
      r.inputs.push_back({in.at("key").get<std::string>(), in.at("path").get<std::string>(),
                          in.at("sha1").get<std::string>()});
    r.input_hash = j.at("input_hash").get<std::string>();
    r.started = j.at("started").get<std::string>();
    r.finished = j.at("finished").get<std::string>();
    for (const auto& o : j.at("outputs"))
      r.outputs.push_back(
          {o.at("path").get<std::string>(), o.at("sha1").get<std::string>(), o.at("bytes").get<std::uint64_t>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("malformed manifest '" + path + "': " + e.what());
  }
}

}  // namespace perclab
