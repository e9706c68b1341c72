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

#ifndef LAM_GRADCHECK_H_
#define LAM_GRADCHECK_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace lam {

// Finite-difference audit of every analytic gradient in the library:
// ce_grad_logits, sca_backward, cascade_backward (K in 1..5, every guidance
// mode) and the end-to-end training gradient.
struct GradcheckOptions {
  std::uint64_t rng_seed = 0;
  int instances = 100;  // randomized instances per suite
  double step = 1e-5;   // central-difference step
  double tolerance = 1e-4;
};

struct GradcheckSuite {
  std::string name;
  int instances = 0;
  std::size_t components = 0;  // gradient entries compared
  double max_rel_error = 0.0;
};

struct GradcheckReport {
  std::vector<GradcheckSuite> suites;
  double tolerance = 0.0;
  bool passed() const;
};

// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
double gradient_rel_error(double analytic, double numeric);

GradcheckReport run_gradcheck(const GradcheckOptions& options = {});

// suite,instances,components,max_rel_error,status
void write_gradcheck_csv(std::ostream& out, const GradcheckReport& report);

}  // namespace lam

#endif  // LAM_GRADCHECK_H_
