#include "cardest/kvconfig.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "cardest/error.hpp"

namespace cardest {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Drops a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '#') {
            return line.substr(0, i);
        }
    }
    return line;
}

bool unquote(const std::string& raw, std::string& out) {
    if (raw.size() >= 2 && (raw.front() == '"' || raw.front() == '\'') && raw.back() == raw.front()) {
        out = raw.substr(1, raw.size() - 2);
        return true;
    }
    out = raw;
    return false;
}

bool valid_key(const std::string& key) {
    return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

}  // namespace

KeyValueDoc KeyValueDoc::parse(std::istream& in, const std::string& origin) {
    KeyValueDoc root;
    root.origin_ = origin;
    KeyValueDoc* target = &root;
    std::string prefix;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& what) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = trim(strip_comment(line));
        if (text.empty()) continue;
        if (text.rfind("[[", 0) == 0) {
            if (text.size() < 4 || text.substr(text.size() - 2) != "]]") fail("malformed array-of-tables header");
            const auto name = trim(text.substr(2, text.size() - 4));
            if (!valid_key(name)) fail("bad table name '" + name + "'");
            auto& list = root.arrays_[name];
            list.emplace_back();
            list.back().origin_ = origin;
            target = &list.back();
            prefix.clear();
            continue;
        }
        if (text.front() == '[') {
            if (text.back() != ']') fail("malformed table header");
            const auto name = trim(text.substr(1, text.size() - 2));
            if (!valid_key(name)) fail("bad table name '" + name + "'");
            target = &root;
            prefix = name + ".";
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const auto key = prefix + trim(text.substr(0, eq));
        const auto raw = trim(text.substr(eq + 1));
        if (!valid_key(key)) fail("bad key '" + key + "'");
        if (raw.empty()) fail("missing value for '" + key + "'");
        if (target->values_.count(key)) fail("duplicate key '" + key + "'");

        Value v;
        if (raw.front() == '[') {
            if (raw.back() != ']') fail("unterminated array for '" + key + "'");
            v.is_array = true;
            const auto body = raw.substr(1, raw.size() - 2);
            std::string item;
            char quote = 0;
            auto flush = [&] {
                item = trim(item);
                if (!item.empty()) {
                    std::string plain;
                    unquote(item, plain);
                    v.items.push_back(plain);
                }
                item.clear();
            };
            for (char c : body) {
                if (quote) {
                    if (c == quote) quote = 0;
                } else if (c == '"' || c == '\'') {
                    quote = c;
                } else if (c == ',') {
                    flush();
                    continue;
                }
                item += c;
            }
            if (quote) fail("unterminated string in array '" + key + "'");
            flush();
            v.text = raw;
        } else {
            v.quoted = unquote(raw, v.text);
            if (!v.quoted && (raw.front() == '"' || raw.front() == '\'')) fail("unterminated string for '" + key + "'");
        }
        target->values_.emplace(key, std::move(v));
    }
    return root;
}

KeyValueDoc KeyValueDoc::parse_string(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    return parse(in, origin);
}

KeyValueDoc KeyValueDoc::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in, path);
}

std::vector<std::string> KeyValueDoc::keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) out.push_back(k);
    return out;
}

const KeyValueDoc::Value* KeyValueDoc::find(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

std::optional<std::string> KeyValueDoc::get_string(const std::string& key) const {
    const auto* v = find(key);
    if (!v) return std::nullopt;
    if (v->is_array) throw ConfigError(origin_ + ": '" + key + "' is an array, expected a scalar");
    return v->text;
}

std::optional<double> KeyValueDoc::get_double(const std::string& key) const {
    const auto s = get_string(key);
    if (!s) return std::nullopt;
    double out = 0.0;
    const auto* last = s->data() + s->size();
    auto [ptr, ec] = std::from_chars(s->data(), last, out);
    if (ec != std::errc{} || ptr != last || s->empty()) {
        throw ConfigError(origin_ + ": '" + key + "' is not a number: " + *s);
    }
    return out;
}

std::optional<std::int64_t> KeyValueDoc::get_int(const std::string& key) const {
    const auto s = get_string(key);
    if (!s) return std::nullopt;
    std::int64_t out = 0;
    const auto* last = s->data() + s->size();
    auto [ptr, ec] = std::from_chars(s->data(), last, out);
    if (ec != std::errc{} || ptr != last || s->empty()) {
        throw ConfigError(origin_ + ": '" + key + "' is not an integer: " + *s);
    }
    return out;
}

std::optional<bool> KeyValueDoc::get_bool(const std::string& key) const {
    const auto s = get_string(key);
    if (!s) return std::nullopt;
    if (*s == "true") return true;
    if (*s == "false") return false;
    throw ConfigError(origin_ + ": '" + key + "' is not a boolean: " + *s);
}

std::optional<std::vector<std::string>> KeyValueDoc::get_list(const std::string& key) const {
    const auto* v = find(key);
    if (!v) return std::nullopt;
    if (v->is_array) return v->items;
    std::vector<std::string> out;
    std::stringstream ss(v->text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

const std::vector<KeyValueDoc>& KeyValueDoc::tables(const std::string& name) const {
    static const std::vector<KeyValueDoc> none;
    const auto it = arrays_.find(name);
    return it == arrays_.end() ? none : it->second;
}

std::vector<std::string> KeyValueDoc::table_names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : arrays_) out.push_back(k);
    return out;
}

void KeyValueDoc::require_known(const std::vector<std::string>& allowed) const {
    for (const auto& [key, v] : values_) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const std::string& a) {
            if (a.size() > 2 && a.substr(a.size() - 2) == ".*") return key.rfind(a.substr(0, a.size() - 1), 0) == 0;
            return a == key;
        });
        if (!ok) throw ConfigError(origin_ + ": unknown key '" + key + "'");
    }
}

}  // namespace cardest
