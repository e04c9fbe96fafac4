#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cardest {

/// A small TOML subset: `key = value` lines, `[table]` headers that prefix
/// later keys ("table.key"), `[[name]]` array-of-tables, `#` comments.
/// Values are strings ("..." or '...'), numbers, booleans, or flat arrays.
class KeyValueDoc {
public:
    static KeyValueDoc parse(std::istream& in, const std::string& origin = "<config>");
    static KeyValueDoc parse_string(const std::string& text, const std::string& origin = "<config>");
    static KeyValueDoc load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::vector<std::string> keys() const;

    std::optional<std::string> get_string(const std::string& key) const;
    std::optional<double> get_double(const std::string& key) const;
    std::optional<std::int64_t> get_int(const std::string& key) const;
    std::optional<bool> get_bool(const std::string& key) const;
    /// Arrays come back element-wise; a scalar string is split on commas.
    std::optional<std::vector<std::string>> get_list(const std::string& key) const;

    /// Entries of every `[[name]]` block in file order.
    const std::vector<KeyValueDoc>& tables(const std::string& name) const;
    std::vector<std::string> table_names() const;

    /// Throws ConfigError naming the first key not in `allowed` (exact or "prefix.*").
    void require_known(const std::vector<std::string>& allowed) const;

private:
    struct Value {
        std::string text;
        bool quoted = false;
        bool is_array = false;
        std::vector<std::string> items;
    };

    const Value* find(const std::string& key) const;

    std::string origin_;
    std::map<std::string, Value> values_;
    std::map<std::string, std::vector<KeyValueDoc>> arrays_;
};

}  // namespace cardest
