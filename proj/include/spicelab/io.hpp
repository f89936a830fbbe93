#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spicelab/engine.hpp"
#include "spicelab/errors.hpp"
#include "spicelab/units.hpp"

namespace spicelab::io {

using ordered_json = nlohmann::ordered_json;

inline uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

// CSV with fixed scientific formatting; byte-identical across runs.
inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_sci(row[i]);
    out << "\n";
  }
  write_file(path, out.str());
}

inline void write_waveform_csv(const std::filesystem::path& path, const Waveform& w) {
  std::ostringstream out;
  out << "time";
  for (const auto& name : w.names()) out << "," << name;
  out << "\n";
  for (size_t k = 0; k < w.samples(); ++k) {
    out << format_sci(w.time_at(k));
    for (const auto& name : w.names()) out << "," << format_sci(w.column(name)[k]);
    out << "\n";
  }
  write_file(path, out.str());
}

// Run metadata: command, resolved configuration, input digests, outputs and
// wall-clock duration. Data files carry no timestamps; the manifest does.
struct RunManifest {
  std::string command;
  ordered_json config;
  ordered_json input_digests = ordered_json::object();
  std::vector<std::string> outputs;
  std::vector<std::string> notes;
  double duration_s = 0.0;
};

inline void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  ordered_json j;
  j["command"] = m.command;
  j["config"] = m.config;
  j["input_digests"] = m.input_digests;
  j["outputs"] = m.outputs;
  j["notes"] = m.notes;
  j["duration_s"] = m.duration_s;
  write_file(path, j.dump(2) + "\n");
}

}  // namespace spicelab::io
