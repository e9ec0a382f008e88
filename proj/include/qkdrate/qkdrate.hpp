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

#include "qkdrate/bell_diagonal.hpp"
#include "qkdrate/bellcore.hpp"
#include "qkdrate/channel.hpp"
#include "qkdrate/entropy.hpp"
#include "qkdrate/error.hpp"
#include "qkdrate/linalg.hpp"
#include "qkdrate/optimize.hpp"
#include "qkdrate/postproc.hpp"
#include "qkdrate/protocol.hpp"
#include "qkdrate/rate_bound.hpp"
#include "qkdrate/singlephoton.hpp"
#include "qkdrate/wcp.hpp"
