#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bcq/types.hpp"

namespace bcq {

/// Flat key-value document: one `key = value` pair per line, `#` comments,
/// dotted section prefixes (params.nu, tol.root_abs_tol, ...). Parsing keeps
/// the raw text so run manifests can hash exactly what was read.
class ConfigDoc {
  public:
    static ConfigDoc parse(const std::string& text);
    static ConfigDoc load(const std::string& path);

    bool has(const std::string& key) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_seed(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::vector<int> get_int_list(const std::string& key) const;

    /// Rejects the document if it contains keys outside `allowed`,
    /// listing the offending names.
    void require_known_keys(const std::set<std::string>& allowed) const;
    void require_present(const std::vector<std::string>& keys) const;

    const std::string& raw_text() const { return raw_; }

  private:
    std::map<std::string, std::string> kv_;
    std::string raw_;
};

/// Keys shared by every subcommand.
extern const std::set<std::string> kCommonKeys;

/// params.* and tol.* extracted and validated.
struct CommonConfig {
    ChannelParams params;
    TolerancePolicy tol;
};

CommonConfig parse_common(const ConfigDoc& doc);

}  // namespace bcq
