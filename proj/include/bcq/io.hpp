#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace bcq {

/// Shortest-exact decimal with 17 significant digits ("%.17g").
std::string format_g17(double v);

/// CSV writer: comma separator, '.' decimal point, 17 significant digits,
/// header row, LF line endings regardless of platform.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);
    void close();

    static std::string cell(double v) { return format_g17(v); }
    static std::string cell(int v) { return std::to_string(v); }

  private:
    std::ofstream out_;
    std::size_t width_;
};

/// FNV-1a hash of the raw config text, recorded in run manifests.
std::uint64_t fnv1a64(std::string_view text);
std::string hex64(std::uint64_t v);

/// Per-run manifest: subcommand, resolved parameters, config hash, outputs,
/// wall time. Written as <out_dir>/run_manifest.json next to the outputs.
class RunManifest {
  public:
    RunManifest(std::string subcommand, std::string config_text);
    void set_parameters(nlohmann::json resolved);
    void add_output(const std::string& path);
    void write(const std::string& out_dir);

    const std::vector<std::string>& outputs() const { return outputs_; }

  private:
    std::string subcommand_;
    std::uint64_t config_hash_;
    nlohmann::json parameters_;
    std::vector<std::string> outputs_;
    std::chrono::steady_clock::time_point start_;
};

/// Versioned JSON payload writer (adds schema_version = 1, sorted keys, LF).
void write_json(const std::string& path, nlohmann::json payload);

void ensure_directory(const std::string& path);

}  // namespace bcq
