/* Copyright 2026 The LAM Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef LAM_MODEL_H_
#define LAM_MODEL_H_

#include <cstdint>
#include <span>
#include <vector>

#include "lam/optou.h"
#include "lam/sca.h"

namespace lam {

// Every learnable parameter of the annotator (the backbone is external and
// frozen) plus the default guidance mode used when labeling.
struct LamModel {
  ScaParams sca;
  OptouParams optou;
  int class_count = 0;
  GuidanceMode mode = GuidanceMode::kSelf;

  // 2K + (N + 1) C
  std::int64_t param_count() const;
  void validate() const;

  // Flat parameter vector in the order: adapter weights, adapter bias,
  // alphas, etas.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);
  // 1 for parameters that receive weight decay (adapter weights only).
  std::vector<std::uint8_t> decay_mask() const;

  friend bool operator==(const LamModel&, const LamModel&) = default;
};

}  // namespace lam

#endif  // LAM_MODEL_H_
