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

// Acceptance suite: one PASS/FAIL line per criterion, then a byte-for-byte
// comparison of two full reports produced with the same seed.

#include <cstdio>
#include <iostream>
#include <thread>

#include "collisim/acceptance.hpp"

int main() {
    using namespace collisim;
    VerifyOptions opt;
    opt.threads = std::max(1u, std::thread::hardware_concurrency());

    const auto first = verify(opt);
    bool ok = true;
    for (const auto& r : first) {
        std::printf("%s %s\n", r.pass() ? "PASS" : "FAIL", r.id.c_str());
        for (const auto& c : r.checks) {
            std::printf("    %-4s %-28s measured=%.10g expected=%.10g tol=%.3g\n",
                        c.pass ? "ok" : "BAD", c.name.c_str(), c.measured, c.expected,
                        c.tolerance);
        }
        if (!r.note.empty()) std::printf("    note: %s\n", r.note.c_str());
        ok = ok && r.pass();
    }

    const std::string a = report_jsonl(first);
    const std::string b = report_jsonl(verify(opt));
    const bool same = a == b;
    std::printf("%s verify_twice_byte_identical (%zu bytes)\n", same ? "PASS" : "FAIL", a.size());
    ok = ok && same;

    std::cout << (ok ? "ALL PASS" : "SOME CRITERIA FAILED") << std::endl;
    return ok ? 0 : 1;
}
