// Copyright 2026 The centerdet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include "centerdet/cnhm.hpp"
#include "centerdet/config.hpp"
#include "centerdet/error.hpp"
#include "centerdet/evaluator.hpp"
#include "centerdet/geometry.hpp"
#include "centerdet/heatmap_codec.hpp"
#include "centerdet/loss.hpp"
#include "centerdet/oracle.hpp"
#include "centerdet/report.hpp"
#include "centerdet/tta.hpp"
#include "centerdet/visdrone_io.hpp"
