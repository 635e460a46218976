#include "bcq/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace bcq {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    return std::all_of(k.begin(), k.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '.';
    });
}

}  // namespace

ConfigDoc ConfigDoc::parse(const std::string& text) {
    ConfigDoc doc;
    doc.raw_ = text;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": bad key '" +
                              key + "'");
        if (value.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty value for key '" + key + "'");
        if (doc.kv_.count(key))
            throw ConfigError("duplicate key '" + key + "'");
        doc.kv_[key] = value;
    }
    return doc;
}

ConfigDoc ConfigDoc::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

bool ConfigDoc::has(const std::string& key) const { return kv_.count(key) != 0; }

double ConfigDoc::get_double(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing key " + key);
    try {
        std::size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not a number: '" + it->second + "'");
    }
}

double ConfigDoc::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int ConfigDoc::get_int(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing key " + key);
    int v = 0;
    auto [p, ec] = std::from_chars(it->second.data(),
                                   it->second.data() + it->second.size(), v);
    if (ec != std::errc() || p != it->second.data() + it->second.size())
        throw ConfigError("key '" + key + "': not an integer: '" + it->second + "'");
    return v;
}

int ConfigDoc::get_int(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t ConfigDoc::get_seed(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing key " + key);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(it->second.data(),
                                   it->second.data() + it->second.size(), v);
    if (ec != std::errc() || p != it->second.data() + it->second.size())
        throw ConfigError("key '" + key + "': not a seed: '" + it->second + "'");
    return v;
}

std::string ConfigDoc::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing key " + key);
    return it->second;
}

std::string ConfigDoc::get_string(const std::string& key,
                                  const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

std::vector<int> ConfigDoc::get_int_list(const std::string& key) const {
    std::string s = get_string(key);
    std::vector<int> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) throw ConfigError("key '" + key + "': empty list entry");
        int v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size())
            throw ConfigError("key '" + key + "': bad list entry '" + tok + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

void ConfigDoc::require_known_keys(const std::set<std::string>& allowed) const {
    std::vector<std::string> unknown;
    for (const auto& [k, v] : kv_)
        if (!allowed.count(k)) unknown.push_back(k);
    if (!unknown.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unknown) msg += " " + k;
        throw ConfigError(msg);
    }
}

void ConfigDoc::require_present(const std::vector<std::string>& keys) const {
    for (const auto& k : keys)
        if (!has(k)) throw ConfigError("missing key " + k);
}

const std::set<std::string> kCommonKeys = {
    "params.nu",         "params.alpha",        "params.L",
    "tol.root_abs_tol",  "tol.residual_rel_tol", "tol.svd_null_ratio",
    "tol.bracket_grid_step", "tol.sep_tol",
};

CommonConfig parse_common(const ConfigDoc& doc) {
    doc.require_present({"params.nu", "params.alpha", "params.L"});
    TolerancePolicy tol;
    tol.root_abs_tol = doc.get_double("tol.root_abs_tol", tol.root_abs_tol);
    tol.residual_rel_tol = doc.get_double("tol.residual_rel_tol", tol.residual_rel_tol);
    tol.svd_null_ratio = doc.get_double("tol.svd_null_ratio", tol.svd_null_ratio);
    tol.bracket_grid_step =
        doc.get_double("tol.bracket_grid_step", tol.bracket_grid_step);
    tol.validate();
    ChannelParams params(doc.get_double("params.nu"), doc.get_double("params.alpha"),
                         doc.get_double("params.L"),
                         doc.get_double("tol.sep_tol", 1e-8));
    return {params, tol};
}

}  // namespace bcq
