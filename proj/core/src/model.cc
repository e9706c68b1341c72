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

#include "lam/model.h"

#include <algorithm>
#include <string>

#include "lam/errors.h"

namespace lam {

std::int64_t LamModel::param_count() const {
  return sca.param_count() + optou.param_count();
}

void LamModel::validate() const {
  sca.validate();
  optou.validate();
  if (sca.n_out != class_count) {
    throw ShapeError("adapter produces " + std::to_string(sca.n_out) +
                     " channels but the model has " +
                     std::to_string(class_count) + " classes");
  }
}

std::vector<double> LamModel::flatten() const {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(param_count()));
  flat.insert(flat.end(), sca.weights.begin(), sca.weights.end());
  flat.insert(flat.end(), sca.bias.begin(), sca.bias.end());
  flat.insert(flat.end(), optou.alphas.begin(), optou.alphas.end());
  flat.insert(flat.end(), optou.etas.begin(), optou.etas.end());
  return flat;
}

void LamModel::assign(std::span<const double> flat) {
  if (flat.size() != static_cast<std::size_t>(param_count())) {
    throw ShapeError("flat parameter vector has " + std::to_string(flat.size()) +
                     " entries, model needs " + std::to_string(param_count()));
  }
  auto it = flat.begin();
  auto take = [&it](std::vector<double>& dst) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(dst.size()), dst.begin());
    it += static_cast<std::ptrdiff_t>(dst.size());
  };
  take(sca.weights);
  take(sca.bias);
  take(optou.alphas);
  take(optou.etas);
}

std::vector<std::uint8_t> LamModel::decay_mask() const {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(param_count()), 0);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(sca.weights.size()), 1);
  return mask;
}

}  // namespace lam
