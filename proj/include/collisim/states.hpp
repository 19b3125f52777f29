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

#ifndef COLLISIM_STATES_HPP_
#define COLLISIM_STATES_HPP_

#include "collisim/linalg.hpp"

namespace collisim {

/// Bloch angles of a pure qubit state cos(theta/2)|e> + e^{i phi} sin(theta/2)|g>.
///
/// theta must lie in [0, pi] (1e-12 slack, then clamped); phi is wrapped into [0, 2 pi).
class BlochParams {
  public:
    BlochParams(double theta, double phi);

    double theta() const { return theta_; }
    double phi() const { return phi_; }

  private:
    double theta_;
    double phi_;
};

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const;
    friend bool operator==(const BlochVector&, const BlochVector&) = default;
};

/// Single-unit reservoir expectation values read off the reservoir density matrix.
struct ReservoirMoments {
    Complex sp;   // <sigma+>, lower-left entry
    Complex sm;   // <sigma->, upper-right entry
    double spm;   // <sigma+ sigma->, excited population
    double smp;   // <sigma- sigma+>, ground population
    double sz;    // <sigma_z>
};

DensityMatrix pure_state(const BlochParams& p);
BlochVector pauli_expectations(const DensityMatrix& rho);
BlochVector pauli_expectations(const CMatrix& rho);
ReservoirMoments reservoir_moments(const BlochParams& p);
CMatrix density_from_moments(const ReservoirMoments& m);

// 2x2 matrix (1 + v.sigma)/2; not validated.
CMatrix density_from_bloch(const BlochVector& v);

}  // namespace collisim

#endif  // COLLISIM_STATES_HPP_
