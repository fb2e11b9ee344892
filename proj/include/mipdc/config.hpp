#pragma once

#include "mipdc/errors.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mipdc {

/// Flat "section.key" -> value store read from INI-style files.
/// Keys before the first section header have no prefix.
class ConfigStore {
public:
    static ConfigStore from_ini_text(const std::string& text, const std::string& origin = "<string>");
    static ConfigStore from_file(const std::filesystem::path& path);

    /// Applies "key=value".
    void set(const std::string& assignment);
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Keys under "section." in sorted order, with the prefix stripped.
    std::vector<std::string> keys_in(const std::string& section) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace mipdc
