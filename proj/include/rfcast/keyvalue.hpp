#pragma once

// Flat key-value configuration files:
//
//   # comment
//   key = value
//   [block name]
//   key = value
//
// Keys before the first block belong to the unnamed top-level block. Blank
// lines and lines starting with '#' are ignored. A key may appear once per block.

#include "rfcast/error.hpp"
#include "rfcast/text.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace rfcast {

struct KeyValueBlock {
    std::string name;  // empty for the top-level block
    std::size_t line = 0;
    std::map<std::string, std::string> values;
    std::map<std::string, std::size_t> lines;

    [[nodiscard]] bool has(const std::string& key) const { return values.contains(key); }

    [[nodiscard]] const std::string& get(const std::string& key, const std::string& context) const {
        const auto it = values.find(key);
        if (it == values.end()) {
            throw ConfigError(context + ": missing required key '" + key + "'");
        }
        return it->second;
    }

    [[nodiscard]] std::string get_or(const std::string& key, std::string fallback) const {
        const auto it = values.find(key);
        return it == values.end() ? std::move(fallback) : it->second;
    }

    /// Rejects any key not in `allowed`.
    void require_known(const std::set<std::string>& allowed, const std::string& context) const {
        for (const auto& [k, v] : values) {
            if (!allowed.contains(k)) {
                throw ConfigError(context + ": unknown key '" + k + "' at line " + std::to_string(lines.at(k)));
            }
        }
    }
};

struct KeyValueFile {
    std::vector<KeyValueBlock> blocks;  // blocks[0] is the top-level block

    [[nodiscard]] const KeyValueBlock& top() const { return blocks.front(); }
};

[[nodiscard]] inline KeyValueFile parse_key_value(std::istream& in, const std::string& source) {
    KeyValueFile file;
    file.blocks.push_back({});
    std::set<std::string> block_names;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const std::string where = source + ":" + std::to_string(line_no);
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) {
                throw ParseError(where + ": malformed block header");
            }
            std::string name(trim(t.substr(1, t.size() - 2)));
            if (name.empty() || !block_names.insert(name).second) {
                throw ParseError(where + ": empty or duplicate block name '" + name + "'");
            }
            file.blocks.push_back({name, line_no, {}, {}});
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(where + ": expected 'key = value'");
        }
        std::string key(trim(t.substr(0, eq)));
        std::string value(trim(t.substr(eq + 1)));
        if (key.empty()) {
            throw ParseError(where + ": empty key");
        }
        auto& block = file.blocks.back();
        if (block.values.contains(key)) {
            throw ParseError(where + ": duplicate key '" + key + "'");
        }
        block.values.emplace(key, std::move(value));
        block.lines.emplace(std::move(key), line_no);
    }
    return file;
}

[[nodiscard]] inline KeyValueFile load_key_value(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    return parse_key_value(in, path);
}

} // namespace rfcast
