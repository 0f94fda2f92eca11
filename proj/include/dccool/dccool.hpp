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

#include "dccool/bench.hpp"
#include "dccool/core.hpp"
#include "dccool/exact.hpp"
#include "dccool/generators.hpp"
#include "dccool/heuristics.hpp"
#include "dccool/io.hpp"
#include "dccool/lp.hpp"
#include "dccool/perturb.hpp"
#include "dccool/relaxation.hpp"
#include "dccool/rng.hpp"
#include "dccool/surrogate.hpp"
