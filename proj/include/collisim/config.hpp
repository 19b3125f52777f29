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

#ifndef COLLISIM_CONFIG_HPP_
#define COLLISIM_CONFIG_HPP_

// Flat `key = value` configuration with dotted keys.
//
//   # comment
//   experiment = fig3
//   reservoir.1.theta = 0
//   reservoir.2.theta = pi
//   schedule.k_mean = 18000
//
// Numbers accept products and quotients of decimal literals and `pi`
// (e.g. `2*pi/3`). Lists are comma separated.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace collisim {

class Config {
  public:
    Config() = default;

    static Config parse(std::string_view text);
    static Config load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;
    void erase(const std::string& key);

    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    std::uint64_t get_uint64(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

    // Sorted `key = value` lines.
    std::string render() const;

  private:
    std::map<std::string, std::string> values_;
};

// Parses a number, `pi`, or a product/quotient chain of them.
double parse_number(std::string_view text);

// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace collisim

#endif  // COLLISIM_CONFIG_HPP_
