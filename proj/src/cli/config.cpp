#include "mixlab/cli/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mixlab/errors.hpp"

namespace mixlab::cli {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

} // namespace

Config Config::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    Config config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument(path + ":" + std::to_string(line_no) +
                                  ": expected `key = value`");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw InvalidArgument(path + ":" + std::to_string(line_no) +
                                  ": empty key");
        }
        config.values_[key] = value;
    }
    return config;
}

void Config::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

bool Config::has(const std::string& key) const {
    return values_.count(key) > 0;
}

void Config::require_known(const std::set<std::string>& allowed) const {
    for (const auto& [key, value] : values_) {
        if (!allowed.count(key)) {
            throw InvalidArgument("unknown config key: " + key);
        }
    }
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::string Config::get_required(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw InvalidArgument("missing required config key: " + key);
    }
    return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    char* end = nullptr;
    const double parsed = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0') {
        throw InvalidArgument("config key " + key + " is not a real: " +
                              it->second);
    }
    return parsed;
}

int Config::get_int(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t used = 0;
        const int parsed = std::stoi(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing");
        return parsed;
    } catch (const std::exception&) {
        throw InvalidArgument("config key " + key + " is not an integer: " +
                              it->second);
    }
}

std::uint64_t Config::get_u64(const std::string& key,
                              std::uint64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t used = 0;
        const std::uint64_t parsed = std::stoull(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing");
        return parsed;
    } catch (const std::exception&) {
        throw InvalidArgument("config key " + key +
                              " is not an unsigned integer: " + it->second);
    }
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return {};
    std::vector<double> out;
    std::stringstream stream(it->second);
    std::string item;
    while (std::getline(stream, item, ',')) {
        const std::string token = trim(item);
        if (token.empty()) {
            throw InvalidArgument("config key " + key + " has an empty entry");
        }
        char* end = nullptr;
        const double parsed = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0') {
            throw InvalidArgument("config key " + key +
                                  " has a non-real entry: " + token);
        }
        out.push_back(parsed);
    }
    return out;
}

} // namespace mixlab::cli
