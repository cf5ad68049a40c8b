// Copyright 2026 The laughgen Authors. All rights reserved.
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

#include "laughgen/acoustic/features.hpp"
#include "laughgen/acoustic/mlpg.hpp"
#include "laughgen/acoustic/model.hpp"
#include "laughgen/acoustic/network.hpp"
#include "laughgen/acoustic/reference.hpp"
#include "laughgen/core/error.hpp"
#include "laughgen/core/rng.hpp"
#include "laughgen/corpus/annotation.hpp"
#include "laughgen/corpus/corpus.hpp"
#include "laughgen/corpus/inventory.hpp"
#include "laughgen/corpus/stats.hpp"
#include "laughgen/corpus/synthetic.hpp"
#include "laughgen/experiment/ablation.hpp"
#include "laughgen/experiment/conditions.hpp"
#include "laughgen/experiment/ratings.hpp"
#include "laughgen/experiment/response.hpp"
#include "laughgen/experiment/stats.hpp"
#include "laughgen/length_model/length_model.hpp"
#include "laughgen/phones/model.hpp"
#include "laughgen/stopping/poisson.hpp"
#include "laughgen/vocoder/vocoder.hpp"
