// Copyright 2026 The stablesketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#pragma once

#include "stablesketch/error.hpp"
#include "stablesketch/io.hpp"
#include "stablesketch/lestimator.hpp"
#include "stablesketch/philox.hpp"
#include "stablesketch/projection.hpp"
#include "stablesketch/quadrature.hpp"
#include "stablesketch/simulation.hpp"
#include "stablesketch/stable_numerics.hpp"
#include "stablesketch/stats.hpp"
