#include "bcq/io.hpp"

#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "bcq/types.hpp"

namespace bcq {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), width_(header.size()) {
    if (!out_) throw NumericError("cannot open output file '" + path + "'");
    for (std::size_t i = 0; i < header.size(); ++i)
        out_ << header[i] << (i + 1 < header.size() ? "," : "");
    out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw NumericError("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i)
        out_ << cells[i] << (i + 1 < cells.size() ? "," : "");
    out_ << "\n";
}

void CsvWriter::close() { out_.close(); }

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

RunManifest::RunManifest(std::string subcommand, std::string config_text)
    : subcommand_(std::move(subcommand)),
      config_hash_(fnv1a64(config_text)),
      start_(std::chrono::steady_clock::now()) {}

void RunManifest::set_parameters(nlohmann::json resolved) {
    parameters_ = std::move(resolved);
}

void RunManifest::add_output(const std::string& path) { outputs_.push_back(path); }

void RunManifest::write(const std::string& out_dir) {
    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start_)
                             .count();
    nlohmann::json j;
    j["schema_version"] = 1;
    j["subcommand"] = subcommand_;
    j["config_hash"] = hex64(config_hash_);
    j["parameters"] = parameters_;
    j["outputs"] = outputs_;
    j["wall_time_seconds"] = elapsed;
    std::ofstream out(out_dir + "/run_manifest.json", std::ios::binary);
    if (!out) throw NumericError("cannot write run manifest");
    out << j.dump(2) << "\n";
}

void write_json(const std::string& path, nlohmann::json payload) {
    payload["schema_version"] = 1;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericError("cannot open output file '" + path + "'");
    out << payload.dump(2) << "\n";
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw ConfigError("cannot create output directory '" + path + "'");
}

}  // namespace bcq
