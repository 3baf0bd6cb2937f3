/*
 * Copyright 2026 The vmwatt Authors.
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

#include "vmwatt/types.hpp"

namespace vmwatt {

std::vector<std::string> default_feature_names() {
  return {kFeatureNames.begin(), kFeatureNames.end()};
}

namespace {

struct FlagName {
  SampleFlag flag;
  std::string_view name;
};

constexpr FlagName kFlagNames[] = {
    {kFlagBaseline, "baseline"},
    {kFlagCounterReset, "counter-reset"},
    {kFlagImplausible, "implausible"},
};

}  // namespace

std::string flags_to_comment(std::uint32_t flags) {
  if (flags == kFlagNone) return {};
  std::string out = "#";
  for (const auto& [flag, name] : kFlagNames) {
    if ((flags & flag) == 0) continue;
    if (out.size() > 1) out += '|';
    out += name;
  }
  return out;
}

std::uint32_t flags_from_comment(std::string_view comment) {
  std::uint32_t flags = kFlagNone;
  if (!comment.empty() && comment.front() == '#') comment.remove_prefix(1);
  while (!comment.empty()) {
    auto bar = comment.find('|');
    auto token = comment.substr(0, bar);
    for (const auto& [flag, name] : kFlagNames) {
      if (token == name) flags |= flag;
    }
    if (bar == std::string_view::npos) break;
    comment.remove_prefix(bar + 1);
  }
  return flags;
}

}  // namespace vmwatt
