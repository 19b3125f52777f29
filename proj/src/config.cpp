// Copyright 2026 The collisim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "collisim/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "collisim/errors.hpp"

namespace collisim {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool valid_key(std::string_view key) {
    if (key.empty() || key.front() == '.' || key.back() == '.') return false;
    for (char c : key) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
    }
    return key.find("..") == std::string_view::npos;
}

double parse_atom(std::string_view s) {
    s = trim(s);
    if (s == "pi") return std::numbers::pi;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw ConfigError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

double parse_number(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw ConfigError("empty number");
    // A leading sign belongs to the first factor.
    double sign = 1.0;
    if (text.front() == '-' && text.size() > 1 && (text.substr(1, 2) == "pi")) {
        sign = -1.0;
        text.remove_prefix(1);
    }
    double value = 0.0;
    char op = '*';
    bool first = true;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        const bool end = i == text.size();
        const char c = end ? '\0' : text[i];
        // '*' or '/' split factors; exponents like 1e-5 contain neither.
        if (end || c == '*' || c == '/') {
            const double atom = parse_atom(text.substr(start, i - start));
            if (first) {
                value = atom;
                first = false;
            } else if (op == '*') {
                value *= atom;
            } else {
                if (atom == 0.0) throw ConfigError("division by zero in '" + std::string(text) + "'");
                value /= atom;
            }
            op = c;
            start = i + 1;
        }
    }
    value *= sign;
    if (!std::isfinite(value)) throw ConfigError("non-finite number '" + std::string(text) + "'");
    return value;
}

Config Config::parse(std::string_view text) {
    Config cfg;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (!valid_key(key)) {
            throw ConfigError("line " + std::to_string(line_no) + ": bad key '" + key + "'");
        }
        if (cfg.has(key)) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        cfg.set(key, value);
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

void Config::erase(const std::string& key) { values_.erase(key); }

const std::string& Config::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing key '" + key + "'");
    return it->second;
}

double Config::get_double(const std::string& key) const {
    try {
        return parse_number(get(key));
    } catch (const ConfigError& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

std::int64_t Config::get_int(const std::string& key) const {
    const double v = get_double(key);
    if (v != std::floor(v) || std::abs(v) > 9e15) throw ConfigError(key + ": not an integer");
    return static_cast<std::int64_t>(v);
}

std::uint64_t Config::get_uint64(const std::string& key) const {
    const std::string& s = get(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw ConfigError(key + ": not an unsigned integer");
    }
    return v;
}

bool Config::get_bool(const std::string& key) const {
    const std::string& s = get(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(key + ": not a boolean");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    std::vector<double> out;
    const std::string& s = get(key);
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = s.find(',', start);
        const std::string_view item =
            trim(std::string_view(s).substr(start, comma == std::string::npos ? std::string::npos
                                                                              : comma - start));
        try {
            out.push_back(parse_number(item));
        } catch (const ConfigError& e) {
            throw ConfigError(key + ": " + e.what());
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string Config::render() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace collisim
