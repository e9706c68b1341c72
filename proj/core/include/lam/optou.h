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

#ifndef LAM_OPTOU_H_
#define LAM_OPTOU_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "lam/tensor.h"

namespace lam {

// Source of the label inside each unrolled gradient step.
enum class GuidanceMode : std::uint8_t {
  kOracle = 0,     // supplied ground truth
  kSelf = 1,       // argmax of the layer's own scaled input
  kScaleOnly = 2,  // no gradient term
};

std::string_view to_string(GuidanceMode mode);
// Accepts "oracle", "self", "scale-only". Throws InvalidInputError.
GuidanceMode parse_guidance_mode(std::string_view name);

// Per-layer scale factors and step sizes of the unrolled cascade.
struct OptouParams {
  std::vector<double> alphas;
  std::vector<double> etas;

  static OptouParams uniform(int layers, double alpha, double eta);

  int layers() const { return static_cast<int>(alphas.size()); }
  std::int64_t param_count() const { return 2 * static_cast<std::int64_t>(alphas.size()); }
  void validate() const;

  friend bool operator==(const OptouParams&, const OptouParams&) = default;
};

// Caches for one layer k: O_{k-1}, s_k = alpha_k * O_{k-1}, softmax(s_k) and
// the guidance labels used in the step. probabilities/guidance are empty in
// scale-only mode.
struct CascadeLayerTrace {
  FeatureTensor input;
  FeatureTensor scaled;
  FeatureTensor probabilities;
  LabelMap guidance;
};

struct CascadeTrace {
  GuidanceMode mode = GuidanceMode::kOracle;
  std::vector<CascadeLayerTrace> layers;
  FeatureTensor output;
};

// One unrolled descent step:
//   alpha * prev - eta * (softmax(alpha * prev) - onehot(g))
// with g the supplied guidance (oracle) or argmax(alpha * prev) (self); the
// gradient term is per pixel, without the 1/P mean factor, and is zero at
// ignore pixels. Scale-only mode returns alpha * prev.
FeatureTensor layer_forward(const FeatureTensor& prev, double alpha, double eta,
                            const LabelMap* guidance, GuidanceMode mode);

// Runs all K layers starting from O_0 = f_sca and keeps every cache needed by
// cascade_backward. trace.output is O_K.
CascadeTrace cascade_forward(const FeatureTensor& f_sca,
                             const OptouParams& params,
                             const LabelMap* guidance, GuidanceMode mode);

// Same as cascade_forward without retaining the trace.
FeatureTensor cascade_apply(const FeatureTensor& f_sca,
                            const OptouParams& params,
                            const LabelMap* guidance, GuidanceMode mode);

// Telescoped form of the cascade output,
//   (prod_k alpha_k) f_sca - sum_k eta_k (prod_{i>k} alpha_i)(p_k - G_k),
// evaluated from the trace's cached softmaxes and guidances.
FeatureTensor closed_form_output(const FeatureTensor& f_sca,
                                 const OptouParams& params,
                                 const CascadeTrace& trace);

struct CascadeGradients {
  std::vector<double> alphas;
  std::vector<double> etas;
  FeatureTensor input;  // with respect to f_sca
};

// Reverse pass through the cascade, contracting with grad_out (dL/dO_K).
// Self-mode pseudo-labels are treated as constants.
CascadeGradients cascade_backward(const CascadeTrace& trace,
                                  const OptouParams& params,
                                  const FeatureTensor& grad_out,
                                  GuidanceMode mode);

}  // namespace lam

#endif  // LAM_OPTOU_H_
