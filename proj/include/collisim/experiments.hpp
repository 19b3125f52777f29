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

#ifndef COLLISIM_EXPERIMENTS_HPP_
#define COLLISIM_EXPERIMENTS_HPP_

// Experiment registry and deterministic CSV output.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "collisim/config.hpp"

namespace collisim {

inline constexpr char kVersion[] = "1.0.0";
inline constexpr std::uint64_t kDefaultSeed = 20260101;

using Cell = std::variant<double, std::int64_t, std::string>;

class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> columns);

    void add(std::vector<Cell> cells);
    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t size() const { return rows_.size(); }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }

    // Header row plus data rows; doubles use 17 significant digits.
    std::string render() const;

  private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

std::string format_double(double v);

struct ExperimentInfo {
    std::string id;
    std::string description;
    std::vector<std::pair<std::string, std::string>> defaults;
};

const std::vector<ExperimentInfo>& experiment_registry();
const ExperimentInfo& find_experiment(std::string_view id);

// COLLISIM_SEED when set, otherwise kDefaultSeed.
std::uint64_t default_seed();

// Merges the experiment defaults under the user's keys, fills `seed`, and
// rejects keys the experiment does not know. Throws ConfigError.
Config effective_config(const Config& user, std::optional<std::uint64_t> seed_override = {});

struct ExperimentOutput {
    CsvTable table;
    std::vector<std::string> notes;  // extra `#` lines
};

ExperimentOutput run_experiment(const Config& effective, unsigned threads = 1);

// Complete CSV text: metadata lines (version, experiment, seed, config,
// config_hash, notes), header, rows.
std::string render_csv(const Config& effective, const ExperimentOutput& output);

// Writes through a temporary sibling and renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

struct RunSummary {
    std::filesystem::path path;
    std::size_t rows = 0;
    std::string config_hash;
};

RunSummary run(const Config& user, std::optional<std::filesystem::path> out = {},
               std::optional<std::uint64_t> seed = {}, unsigned threads = 1);

}  // namespace collisim

#endif  // COLLISIM_EXPERIMENTS_HPP_
