#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace perclab {

// SHA-1 of "blob <size>\0<content>", the hash git assigns to a file
std::string git_blob_sha1(std::string_view content);
std::string file_blob_sha1(const std::string& path);
std::string read_file(const std::string& path);

struct OutputFile {
  std::string path;
  std::string sha1;
  std::uint64_t bytes = 0;
  bool operator==(const OutputFile&) const = default;
};

struct InputFile {
  std::string key;  // config key that named the file
  std::string path;
  std::string sha1;
};

struct ExperimentRecord {
  std::string id;          // derived from command and config snapshot
  std::string command;
  std::string config;      // canonical config snapshot
  std::vector<InputFile> inputs;
  std::string input_hash;  // hash over the config snapshot and every input file
  std::string started;     // UTC, ISO 8601
  std::string finished;
  std::vector<OutputFile> outputs;
};

std::string utc_timestamp();
std::string experiment_id(const std::string& command, const std::string& config);
std::string combined_input_hash(const std::string& config, const std::vector<InputFile>& inputs);
OutputFile describe_output(const std::string& path);

std::string manifest_path(const std::string& output_path);  // "<output>.manifest.json"
void write_manifest(const ExperimentRecord& record, const std::string& path);
ExperimentRecord read_manifest(const std::string& path);

}  // namespace perclab
