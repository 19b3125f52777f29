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

#ifndef COLLISIM_ERRORS_HPP_
#define COLLISIM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace collisim {

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Liouvillian null space is not one-dimensional.
struct DegenerateSteadyState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Perturbative closed form evaluated outside the regime where it yields a state.
struct DomainOfValidity : std::domain_error {
    using std::domain_error::domain_error;
};

struct PureStateError : std::domain_error {
    using std::domain_error::domain_error;
};

struct SingularPoint : std::domain_error {
    using std::domain_error::domain_error;
};

struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace collisim

#endif  // COLLISIM_ERRORS_HPP_
