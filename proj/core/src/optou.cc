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

#include "lam/optou.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lam/errors.h"

namespace lam {
namespace {

FeatureTensor scale(const FeatureTensor& t, double alpha) {
  FeatureTensor out = t;
  for (double& v : out.data()) v *= alpha;
  return out;
}

void check_guidance(const FeatureTensor& prev, const LabelMap* guidance,
                    GuidanceMode mode) {
  if (mode != GuidanceMode::kOracle) return;
  if (guidance == nullptr) {
    throw InvalidInputError("oracle guidance mode requires a label map");
  }
  if (guidance->height() != prev.height() || guidance->width() != prev.width()) {
    throw ShapeError("guidance label map does not match the cascade input");
  }
  guidance->validate(prev.channels());
}

// out -= eta * (probs - onehot(labels)), skipping ignore pixels.
void subtract_gradient_term(FeatureTensor& out, double eta,
                            const FeatureTensor& probs,
                            const LabelMap& labels) {
  const std::size_t pixels = out.pixel_count();
  for (int c = 0; c < out.channels(); ++c) {
    auto o = out.channel(c);
    auto p = probs.channel(c);
    for (std::size_t i = 0; i < pixels; ++i) {
      const std::uint16_t id = labels[i];
      if (id == kIgnoreLabel) continue;
      o[i] -= eta * (p[i] - (id == c ? 1.0 : 0.0));
    }
  }
}

// Shared body of layer_forward; fills the cache when one is given.
FeatureTensor run_layer(const FeatureTensor& prev, double alpha, double eta,
                        const LabelMap* guidance, GuidanceMode mode,
                        CascadeLayerTrace* cache) {
  FeatureTensor scaled = scale(prev, alpha);
  if (mode == GuidanceMode::kScaleOnly) {
    if (cache != nullptr) {
      cache->input = prev;
      cache->scaled = scaled;
    }
    return scaled;
  }
  FeatureTensor probs = softmax_channels(scaled);
  LabelMap labels = mode == GuidanceMode::kOracle ? *guidance
                                                  : argmax_channels(scaled);
  FeatureTensor out = scaled;
  subtract_gradient_term(out, eta, probs, labels);
  if (cache != nullptr) {
    cache->input = prev;
    cache->scaled = std::move(scaled);
    cache->probabilities = std::move(probs);
    cache->guidance = std::move(labels);
  }
  return out;
}

}  // namespace

std::string_view to_string(GuidanceMode mode) {
  switch (mode) {
    case GuidanceMode::kOracle:
      return "oracle";
    case GuidanceMode::kSelf:
      return "self";
    case GuidanceMode::kScaleOnly:
      return "scale-only";
  }
  return "unknown";
}

GuidanceMode parse_guidance_mode(std::string_view name) {
  if (name == "oracle") return GuidanceMode::kOracle;
  if (name == "self") return GuidanceMode::kSelf;
  if (name == "scale-only") return GuidanceMode::kScaleOnly;
  throw InvalidInputError("unknown guidance mode '" + std::string(name) +
                          "' (expected oracle, self or scale-only)");
}

OptouParams OptouParams::uniform(int layers, double alpha, double eta) {
  if (layers < 1) throw InvalidInputError("cascade needs at least one layer");
  OptouParams p;
  p.alphas.assign(static_cast<std::size_t>(layers), alpha);
  p.etas.assign(static_cast<std::size_t>(layers), eta);
  p.validate();
  return p;
}

void OptouParams::validate() const {
  if (alphas.empty()) throw InvalidInputError("cascade needs at least one layer");
  if (alphas.size() != etas.size()) {
    throw ShapeError("cascade has " + std::to_string(alphas.size()) +
                     " alphas but " + std::to_string(etas.size()) + " etas");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(alphas.begin(), alphas.end(), finite) ||
      !std::all_of(etas.begin(), etas.end(), finite)) {
    throw InvalidInputError("cascade parameters contain non-finite values");
  }
}

FeatureTensor layer_forward(const FeatureTensor& prev, double alpha, double eta,
                            const LabelMap* guidance, GuidanceMode mode) {
  if (!prev.all_finite()) {
    throw InvalidInputError("cascade layer input contains non-finite values");
  }
  check_guidance(prev, guidance, mode);
  return run_layer(prev, alpha, eta, guidance, mode, nullptr);
}

CascadeTrace cascade_forward(const FeatureTensor& f_sca,
                             const OptouParams& params,
                             const LabelMap* guidance, GuidanceMode mode) {
  params.validate();
  check_guidance(f_sca, guidance, mode);
  CascadeTrace trace;
  trace.mode = mode;
  trace.layers.resize(params.alphas.size());
  FeatureTensor current = f_sca;
  for (std::size_t k = 0; k < params.alphas.size(); ++k) {
    current = run_layer(current, params.alphas[k], params.etas[k], guidance,
                        mode, &trace.layers[k]);
  }
  if (!current.all_finite()) {
    throw InvalidInputError("cascade output is non-finite");
  }
  trace.output = std::move(current);
  return trace;
}

// Runs every layer on one block of pixels at a time. Each element sees the
// same operations in the same order as run_layer, so the result matches
// cascade_forward bitwise.
FeatureTensor cascade_apply(const FeatureTensor& f_sca,
                            const OptouParams& params,
                            const LabelMap* guidance, GuidanceMode mode) {
  params.validate();
  check_guidance(f_sca, guidance, mode);
  constexpr std::size_t kBlock = 256;
  const int channels = f_sca.channels();
  const std::size_t pixels = f_sca.pixel_count();
  FeatureTensor out(channels, f_sca.height(), f_sca.width());
  std::vector<double> s(static_cast<std::size_t>(channels) * kBlock);
  std::vector<double> e(s.size());
  double m[kBlock], inv[kBlock];
  std::uint16_t labels[kBlock];

  for (std::size_t start = 0; start < pixels; start += kBlock) {
    const std::size_t len = std::min(kBlock, pixels - start);
    auto row = [&](std::vector<double>& v, int c) { return v.data() + c * kBlock; };
    for (int c = 0; c < channels; ++c) {
      std::copy_n(f_sca.channel(c).data() + start, len, row(s, c));
    }
    for (std::size_t k = 0; k < params.alphas.size(); ++k) {
      const double alpha = params.alphas[k], eta = params.etas[k];
      for (int c = 0; c < channels; ++c) {
        double* sc = row(s, c);
        for (std::size_t p = 0; p < len; ++p) sc[p] *= alpha;
      }
      if (mode == GuidanceMode::kScaleOnly) continue;

      for (int c = 0; c < channels; ++c) {
        const double* sc = row(s, c);
        if (!std::all_of(sc, sc + len, [](double v) { return std::isfinite(v); })) {
          throw InvalidInputError("softmax input contains non-finite values");
        }
      }
      std::copy_n(row(s, 0), len, m);
      std::fill_n(labels, len, std::uint16_t{0});
      for (int c = 1; c < channels; ++c) {
        const double* sc = row(s, c);
        for (std::size_t p = 0; p < len; ++p) {
          if (sc[p] > m[p]) labels[p] = static_cast<std::uint16_t>(c);
          m[p] = std::max(m[p], sc[p]);
        }
      }
      if (mode == GuidanceMode::kOracle) {
        std::copy_n(guidance->ids().data() + start, len, labels);
      }
      std::fill_n(inv, len, 0.0);
      for (int c = 0; c < channels; ++c) {
        const double* sc = row(s, c);
        double* ec = row(e, c);
        for (std::size_t p = 0; p < len; ++p) {
          ec[p] = std::exp(sc[p] - m[p]);
          inv[p] += ec[p];
        }
      }
      for (std::size_t p = 0; p < len; ++p) inv[p] = 1.0 / inv[p];
      for (int c = 0; c < channels; ++c) {
        double* sc = row(s, c);
        const double* ec = row(e, c);
        for (std::size_t p = 0; p < len; ++p) {
          if (labels[p] == kIgnoreLabel) continue;
          sc[p] -= eta * (ec[p] * inv[p] - (labels[p] == c ? 1.0 : 0.0));
        }
      }
    }
    for (int c = 0; c < channels; ++c) {
      std::copy_n(row(s, c), len, out.channel(c).data() + start);
    }
  }
  if (!out.all_finite()) {
    throw InvalidInputError("cascade output is non-finite");
  }
  return out;
}

FeatureTensor closed_form_output(const FeatureTensor& f_sca,
                                 const OptouParams& params,
                                 const CascadeTrace& trace) {
  params.validate();
  if (trace.layers.size() != params.alphas.size()) {
    throw ShapeError("trace has " + std::to_string(trace.layers.size()) +
                     " layers, parameters have " +
                     std::to_string(params.alphas.size()));
  }
  const std::size_t layers = params.alphas.size();
  double product = 1.0;
  for (double a : params.alphas) product *= a;
  FeatureTensor out = scale(f_sca, product);
  if (trace.mode == GuidanceMode::kScaleOnly) return out;

  for (std::size_t k = 0; k < layers; ++k) {
    const CascadeLayerTrace& layer = trace.layers[k];
    if (!layer.probabilities.same_shape(f_sca) ||
        layer.guidance.pixel_count() != f_sca.pixel_count()) {
      throw ShapeError("trace layer " + std::to_string(k) +
                       " does not match the adapter output shape");
    }
    double tail = 1.0;
    for (std::size_t i = k + 1; i < layers; ++i) tail *= params.alphas[i];
    subtract_gradient_term(out, params.etas[k] * tail, layer.probabilities,
                           layer.guidance);
  }
  return out;
}

CascadeGradients cascade_backward(const CascadeTrace& trace,
                                  const OptouParams& params,
                                  const FeatureTensor& grad_out,
                                  GuidanceMode mode) {
  params.validate();
  if (mode != trace.mode) {
    throw InvalidInputError("cascade_backward called with mode '" +
                            std::string(to_string(mode)) +
                            "' on a trace recorded in mode '" +
                            std::string(to_string(trace.mode)) + "'");
  }
  if (trace.layers.size() != params.alphas.size()) {
    throw ShapeError("trace depth does not match the cascade parameters");
  }
  if (!grad_out.same_shape(trace.output)) {
    throw ShapeError("output gradient does not match the cascade output");
  }

  const std::size_t layers = params.alphas.size();
  const std::size_t pixels = grad_out.pixel_count();
  const int channels = grad_out.channels();
  CascadeGradients g;
  g.alphas.assign(layers, 0.0);
  g.etas.assign(layers, 0.0);

  FeatureTensor upstream = grad_out;  // dL/dO_k
  std::vector<double> dot(pixels);
  for (std::size_t k = layers; k-- > 0;) {
    const CascadeLayerTrace& layer = trace.layers[k];
    FeatureTensor grad_scaled = upstream;  // dL/ds_k
    if (mode != GuidanceMode::kScaleOnly) {
      const FeatureTensor& probs = layer.probabilities;
      const LabelMap& labels = layer.guidance;
      const double eta = params.etas[k];

      // d(O_k)/d(eta_k) = -(p - G)
      double eta_grad = 0.0;
      std::fill(dot.begin(), dot.end(), 0.0);
      for (int c = 0; c < channels; ++c) {
        auto u = upstream.channel(c);
        auto p = probs.channel(c);
        for (std::size_t i = 0; i < pixels; ++i) {
          const std::uint16_t id = labels[i];
          if (id == kIgnoreLabel) continue;
          eta_grad -= u[i] * (p[i] - (id == c ? 1.0 : 0.0));
          dot[i] += p[i] * u[i];
        }
      }
      g.etas[k] = eta_grad;

      // Softmax Jacobian transpose: J^T u = p * (u - <p, u>).
      for (int c = 0; c < channels; ++c) {
        auto u = upstream.channel(c);
        auto p = probs.channel(c);
        auto gs = grad_scaled.channel(c);
        for (std::size_t i = 0; i < pixels; ++i) {
          if (labels[i] == kIgnoreLabel) continue;
          gs[i] -= eta * p[i] * (u[i] - dot[i]);
        }
      }
    }

    double alpha_grad = 0.0;
    const auto in = layer.input.data();
    const auto gs = grad_scaled.data();
    for (std::size_t i = 0; i < gs.size(); ++i) alpha_grad += gs[i] * in[i];
    g.alphas[k] = alpha_grad;

    const double alpha = params.alphas[k];
    for (double& v : grad_scaled.data()) v *= alpha;
    upstream = std::move(grad_scaled);
  }
  g.input = std::move(upstream);
  return g;
}

}  // namespace lam
