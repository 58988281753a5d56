// Copyright 2026 The stim Authors.
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

#pragma once

#include <string>
#include <string_view>

#include "stim/backbone.hpp"

// JSON form of a backbone. Layer objects carry "name", "kind" and "tap" plus
// kind-specific fields; see README for the schema.

namespace stim {

std::string backbone_to_json(const BackboneConfig& cfg);

/// Parses and validates. Throws ConfigError naming the offending layer.
BackboneConfig backbone_from_json(std::string_view text);

/// A preset name, or a path to a JSON backbone file.
BackboneConfig resolve_backbone(const std::string& name_or_path);

}  // namespace stim
