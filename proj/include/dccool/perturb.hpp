// Copyright 2026 The dccool Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>

#include "dccool/core.hpp"
#include "dccool/rng.hpp"

namespace dccool {

// Multiplies every entry of A, B and E by an independent factor drawn
// uniformly from [lo, hi]. Draw order: A row-major, B row-major, then E.
inline ProblemInstance Perturb(const ProblemInstance& p, double lo, double hi,
                               std::uint64_t seed) {
  if (!(lo <= hi)) throw Error(ErrorCode::kPreconditionViolated, "perturb requires lo <= hi");
  if (lo < 0.0) throw Error(ErrorCode::kPreconditionViolated, "perturb factors must be >= 0");
  ProblemInstance out = p;
  if (lo == hi && lo == 1.0) return out;
  Rng rng(seed);
  for (double& x : out.A.data()) x *= rng.uniform(lo, hi);
  for (double& x : out.B.data()) x *= rng.uniform(lo, hi);
  for (double& x : out.E) x *= rng.uniform(lo, hi);
  return out;
}

}  // namespace dccool
