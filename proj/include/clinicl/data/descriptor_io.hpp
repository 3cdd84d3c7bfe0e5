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

#include "clinicl/data/dataset.hpp"

namespace clinicl {

// Loads a JSON dataset descriptor. A relative csv_path is resolved against
// the descriptor's directory. Throws kConfigError on schema problems.
DatasetDescriptor load_descriptor(const std::string& path);
DatasetDescriptor parse_descriptor(const std::string& json_text,
                                   const std::string& base_dir);

}  // namespace clinicl
