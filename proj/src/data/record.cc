// Copyright 2026 The s2st Authors.
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

#include "s2st/data/record.h"

#include <algorithm>
#include <string>

#include "s2st/common/error.h"

namespace s2st::data {

std::string_view CategoryName(Category c) {
  return c == Category::kPrimary ? "primary" : "secondary";
}

std::string_view OriginName(Origin o) { return o == Origin::kReal ? "real" : "pseudo"; }

std::string_view RoleName(Role r) {
  switch (r) {
    case Role::kPrimary: return "primary";
    case Role::kSecondary: return "secondary";
    case Role::kMixed: return "mixed";
  }
  return "?";
}

Category ParseCategory(std::string_view s) {
  if (s == "primary") return Category::kPrimary;
  if (s == "secondary") return Category::kSecondary;
  throw ParseError("unknown category '" + std::string(s) + "'");
}

Origin ParseOrigin(std::string_view s) {
  if (s == "real") return Origin::kReal;
  if (s == "pseudo") return Origin::kPseudo;
  throw ParseError("unknown origin '" + std::string(s) + "'");
}

Role ParseRole(std::string_view s) {
  if (s == "primary") return Role::kPrimary;
  if (s == "secondary") return Role::kSecondary;
  if (s == "mixed") return Role::kMixed;
  throw ParseError("unknown role '" + std::string(s) + "'");
}

bool UtteranceRecord::HasFlag(std::string_view flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

void UtteranceRecord::AddFlag(std::string_view flag) {
  if (!HasFlag(flag)) flags.emplace_back(flag);
}

}  // namespace s2st::data
