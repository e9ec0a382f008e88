// Copyright 2026 The qkdrate Authors
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

#include "qkdrate/error.hpp"

namespace qkdrate {

enum class Protocol { bb84, six_state, sarg };

inline const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::bb84: return "bb84";
    case Protocol::six_state: return "six-state";
    case Protocol::sarg: return "sarg";
  }
  return "?";
}

inline Protocol parse_protocol(std::string_view s) {
  if (s == "bb84") return Protocol::bb84;
  if (s == "six-state" || s == "sixstate") return Protocol::six_state;
  if (s == "sarg") return Protocol::sarg;
  throw DomainError("unknown protocol '" + std::string(s) + "'");
}

}  // namespace qkdrate
