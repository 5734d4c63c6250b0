#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cmgym {

/// Layered key-value configuration with dotted keys.
///
/// Every key must exist in the built-in schema. Later layers (files, then
/// `key=value` overrides) replace earlier values. Text format:
///
///     # comment
///     fleet_size = 100
///     [hazard]
///     e_max_kwh = 150      # same as hazard.e_max_kwh
class Config {
public:
    /// Schema defaults.
    Config();

    void load_file(const std::string& path);
    void load_text(std::string_view text, const std::string& origin = "<text>");
    void set(const std::string& key, const std::string& value);
    /// Parses `key=value`.
    void apply_override(std::string_view assignment);

    static bool known_key(const std::string& key);
    static const std::string& describe(const std::string& key);
    static std::vector<std::string> schema_keys();

    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    /// Every key with its current value, in schema order, as loadable text.
    std::string to_text() const;

    /// Directory of the last loaded file, used to resolve relative paths.
    const std::string& base_dir() const { return base_dir_; }
    std::string resolve_path(const std::string& path) const;

private:
    std::map<std::string, std::string> values_;
    std::string base_dir_;
};

/// Splits on `sep`, trimming whitespace and dropping empty items.
std::vector<std::string> split_list(std::string_view text, char sep);
std::string trim(std::string_view s);

}  // namespace cmgym
