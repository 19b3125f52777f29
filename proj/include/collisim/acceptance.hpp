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

#ifndef COLLISIM_ACCEPTANCE_HPP_
#define COLLISIM_ACCEPTANCE_HPP_

// End-to-end acceptance checks with pinned tolerances and a JSON-lines report.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "collisim/experiments.hpp"

namespace collisim {

struct Check {
    std::string name;
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct CriterionResult {
    std::string id;
    std::vector<Check> checks;
    std::string note;

    bool pass() const;
};

struct VerifyOptions {
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 1;
    // "criterion.check" -> tolerance, replacing the pinned value (test hook).
    std::map<std::string, double> tolerance_overrides;
    // Empty: every criterion.
    std::set<std::string> only;
};

const std::vector<std::string>& criterion_ids();

std::vector<CriterionResult> verify(const VerifyOptions& options = {});

// One JSON object per criterion: id, measured, expected, tolerance, pass, note.
std::string report_jsonl(const std::vector<CriterionResult>& results);

}  // namespace collisim

#endif  // COLLISIM_ACCEPTANCE_HPP_
