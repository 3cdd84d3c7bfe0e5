// Copyright 2026 The clinicl Authors
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

#pragma once

#include <string>
#include <string_view>

#include "clinicl/baselines/models.hpp"

namespace clinicl {

inline constexpr int kModelFormatVersion = 1;

// Versioned JSON dump of spec, learned state and importances. Doubles are
// written in shortest round-trip form, so load(save(m)) predicts exactly as m.
std::string save_model(const TrainedModel& model);
TrainedModel load_model(std::string_view text);

}  // namespace clinicl
