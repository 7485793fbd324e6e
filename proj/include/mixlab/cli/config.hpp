#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace mixlab::cli {

/// Flat `key = value` configuration with '#' comments. Unknown keys are a
/// hard error so misspellings cannot silently fall back to defaults.
class Config {
public:
    Config() = default;

    static Config load_file(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    /// Throws InvalidArgument naming the first key outside `allowed`.
    void require_known(const std::set<std::string>& allowed) const;

    std::string get_string(const std::string& key,
                           const std::string& fallback) const;
    std::string get_required(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    /// Comma-separated list of reals.
    std::vector<double> get_doubles(const std::string& key) const;

private:
    std::map<std::string, std::string> values_;
};

} // namespace mixlab::cli
