// Copyright 2026 The swam-sim Authors
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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace swam {

// scenarios/*.scn compiled into the library; name is the file stem.
struct PresetFile {
  const char* name;
  const char* content;
};

const std::vector<PresetFile>& preset_files();

inline std::optional<std::string> preset_text(std::string_view name) {
  for (const PresetFile& p : preset_files()) {
    if (name == p.name) return std::string(p.content);
  }
  return std::nullopt;
}

}  // namespace swam
