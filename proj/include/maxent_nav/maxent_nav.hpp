// Copyright 2026 The maxent_nav Authors
//
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

#ifndef MAXENT_NAV_MAXENT_NAV_HPP
#define MAXENT_NAV_MAXENT_NAV_HPP

#include "maxent_nav/environment.hpp"
#include "maxent_nav/error.hpp"
#include "maxent_nav/evaluation.hpp"
#include "maxent_nav/feature_maps.hpp"
#include "maxent_nav/grid.hpp"
#include "maxent_nav/io.hpp"
#include "maxent_nav/irl.hpp"
#include "maxent_nav/model.hpp"
#include "maxent_nav/planners.hpp"
#include "maxent_nav/scenario.hpp"
#include "maxent_nav/worlds.hpp"

#endif  // MAXENT_NAV_MAXENT_NAV_HPP
