/*
 * Copyright 2026 The xbandit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "xbandit/error.hpp"
#include "xbandit/log_math.hpp"
#include "xbandit/rng.hpp"
#include "xbandit/parallel.hpp"
#include "xbandit/distribution.hpp"
#include "xbandit/construction.hpp"
#include "xbandit/policy.hpp"
#include "xbandit/engine.hpp"
#include "xbandit/oracles.hpp"
#include "xbandit/regret.hpp"
#include "xbandit/stats.hpp"
#include "xbandit/verify.hpp"
#include "xbandit/instances.hpp"
#include "xbandit/serialize.hpp"
