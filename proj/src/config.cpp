#include "mipdc/config.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace mipdc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

ConfigStore ConfigStore::from_ini_text(const std::string& text, const std::string& origin) {
    ConfigStore store;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ContractError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ContractError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (const auto hash = value.find(" #"); hash != std::string::npos) value = trim(value.substr(0, hash));
        if (key.empty()) throw ContractError(origin + ":" + std::to_string(lineno) + ": empty key");
        store.values_[section.empty() ? key : section + "." + key] = value;
    }
    return store;
}

ConfigStore ConfigStore::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    if (path.extension() == ".json") {
        // A report embeds its resolved config; accept it for re-runs.
        ConfigStore store;
        try {
            const auto j = nlohmann::json::parse(buf.str());
            const auto& cfg = j.contains("config") ? j.at("config") : j;
            for (const auto& [k, v] : cfg.items()) store.values_[k] = v.get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("config '" + path.string() + "': " + e.what());
        }
        return store;
    }
    return from_ini_text(buf.str(), path.string());
}

void ConfigStore::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ContractError("--set expects key=value, got '" + assignment + "'");
    values_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

std::string ConfigStore::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double ConfigStore::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v = 0.0;
    const auto& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ContractError("config key '" + key + "' expects a number, got '" + s + "'");
    return v;
}

long ConfigStore::get_int(const std::string& key, long fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    long v = 0;
    const auto& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ContractError("config key '" + key + "' expects an integer, got '" + s + "'");
    return v;
}

bool ConfigStore::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    auto s = it->second;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ContractError("config key '" + key + "' expects a boolean, got '" + it->second + "'");
}

std::vector<std::string> ConfigStore::keys_in(const std::string& section) const {
    std::vector<std::string> keys;
    const auto prefix = section + ".";
    for (const auto& [k, v] : values_)
        if (k.rfind(prefix, 0) == 0) keys.push_back(k.substr(prefix.size()));
    return keys;
}

}  // namespace mipdc
