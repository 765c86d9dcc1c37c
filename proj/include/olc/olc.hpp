/*
 Copyright 2026 The OLC Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include "olc/benchmarks.hpp"
#include "olc/config.hpp"
#include "olc/controllers.hpp"
#include "olc/costs.hpp"
#include "olc/errors.hpp"
#include "olc/harness.hpp"
#include "olc/linalg.hpp"
#include "olc/rng.hpp"
#include "olc/system.hpp"
