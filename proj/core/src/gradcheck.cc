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

#include "lam/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "lam/model.h"
#include "lam/optou.h"
#include "lam/sca.h"
#include "lam/tensor.h"
#include "lam/trainer.h"

namespace lam {
namespace {

using Rng = std::mt19937_64;

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

FeatureTensor random_tensor(Rng& rng, int c, int h, int w, double lo, double hi) {
  FeatureTensor t(c, h, w);
  for (double& v : t.data()) v = uniform(rng, lo, hi);
  return t;
}

// Labels in [0, classes) with roughly one pixel in eight ignored; at least one
// pixel stays labeled.
LabelMap random_labels(Rng& rng, int h, int w, int classes, bool allow_ignore) {
  LabelMap labels(h, w);
  for (std::uint16_t& id : labels.ids()) {
    id = static_cast<std::uint16_t>(uniform_int(rng, 0, classes - 1));
    if (allow_ignore && uniform_int(rng, 0, 7) == 0) id = kIgnoreLabel;
  }
  if (labels.valid_count() == 0) labels[0] = 0;
  return labels;
}

double central_difference(const std::function<double()>& f, double& x, double h) {
  const double saved = x;
  x = saved + h;
  const double up = f();
  x = saved - h;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * h);
}

class SuiteAccumulator {
 public:
  explicit SuiteAccumulator(std::string name) { suite_.name = std::move(name); }

  void compare(double analytic, double numeric) {
    suite_.max_rel_error =
        std::max(suite_.max_rel_error, gradient_rel_error(analytic, numeric));
    ++suite_.components;
  }
  void finish_instance() { ++suite_.instances; }
  GradcheckSuite result() const { return suite_; }

 private:
  GradcheckSuite suite_;
};

double contract(const FeatureTensor& a, const FeatureTensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

GradcheckSuite check_cross_entropy(Rng& rng, const GradcheckOptions& opt) {
  SuiteAccumulator acc("ce_grad_logits");
  for (int i = 0; i < opt.instances; ++i) {
    const int c = uniform_int(rng, 2, 6);
    const int h = uniform_int(rng, 1, 4);
    const int w = uniform_int(rng, 1, 4);
    FeatureTensor logits = random_tensor(rng, c, h, w, -3.0, 3.0);
    const LabelMap target = random_labels(rng, h, w, c, true);
    const FeatureTensor grad = ce_grad_logits(target, logits);
    for (std::size_t j = 0; j < logits.size(); ++j) {
      const double numeric = central_difference(
          [&] { return cross_entropy(target, logits); }, logits[j], opt.step);
      acc.compare(grad[j], numeric);
    }
    acc.finish_instance();
  }
  return acc.result();
}

GradcheckSuite check_sca(Rng& rng, const GradcheckOptions& opt) {
  SuiteAccumulator acc("sca_backward");
  for (int i = 0; i < opt.instances; ++i) {
    const int n = uniform_int(rng, 1, 8);
    const int c = uniform_int(rng, 1, 8);
    const int h = uniform_int(rng, 1, 4);
    const int w = uniform_int(rng, 1, 4);
    ScaParams params = ScaParams::zeros(n, c);
    for (double& v : params.weights) v = uniform(rng, -1.0, 1.0);
    for (double& v : params.bias) v = uniform(rng, -0.5, 0.5);
    FeatureTensor input = random_tensor(rng, n, h, w, -1.0, 1.0);
    const LabelMap target = random_labels(rng, h, w, c, true);

    auto loss = [&] { return cross_entropy(target, sca_forward(input, params)); };
    const FeatureTensor pre = sca_preactivation(input, params);
    FeatureTensor out = pre;
    for (double& v : out.data()) v = std::max(v, 0.0);
    const ScaGradients g =
        sca_backward(ce_grad_logits(target, out), input, pre, params);

    for (std::size_t j = 0; j < params.weights.size(); ++j) {
      acc.compare(g.weights[j],
                  central_difference(loss, params.weights[j], opt.step));
    }
    for (std::size_t j = 0; j < params.bias.size(); ++j) {
      acc.compare(g.bias[j], central_difference(loss, params.bias[j], opt.step));
    }
    for (std::size_t j = 0; j < input.size(); ++j) {
      acc.compare(g.input[j], central_difference(loss, input[j], opt.step));
    }
    acc.finish_instance();
  }
  return acc.result();
}

GradcheckSuite check_cascade(Rng& rng, const GradcheckOptions& opt) {
  SuiteAccumulator acc("cascade_backward");
  constexpr GuidanceMode kModes[] = {GuidanceMode::kOracle, GuidanceMode::kSelf,
                                     GuidanceMode::kScaleOnly};
  for (int i = 0; i < opt.instances; ++i) {
    const GuidanceMode mode = kModes[i % 3];
    const int k = 1 + (i / 3) % 5;
    const int c = uniform_int(rng, 2, 6);
    const int h = uniform_int(rng, 1, 4);
    const int w = uniform_int(rng, 1, 4);
    OptouParams params;
    for (int l = 0; l < k; ++l) {
      params.alphas.push_back(uniform(rng, 0.5, 1.5));
      params.etas.push_back(uniform(rng, 0.0, 0.5));
    }
    FeatureTensor f_sca = random_tensor(rng, c, h, w, -2.0, 2.0);
    const LabelMap gt = random_labels(rng, h, w, c, true);
    const FeatureTensor probe = random_tensor(rng, c, h, w, -1.0, 1.0);
    const LabelMap* guidance = mode == GuidanceMode::kOracle ? &gt : nullptr;

    auto objective = [&] {
      return contract(probe, cascade_apply(f_sca, params, guidance, mode));
    };
    const CascadeTrace trace = cascade_forward(f_sca, params, guidance, mode);
    const CascadeGradients g = cascade_backward(trace, params, probe, mode);

    for (int l = 0; l < k; ++l) {
      acc.compare(g.alphas[l],
                  central_difference(objective, params.alphas[l], opt.step));
      acc.compare(g.etas[l], central_difference(objective, params.etas[l], opt.step));
    }
    for (std::size_t j = 0; j < f_sca.size(); ++j) {
      acc.compare(g.input[j], central_difference(objective, f_sca[j], opt.step));
    }
    acc.finish_instance();
  }
  return acc.result();
}

GradcheckSuite check_end_to_end(Rng& rng, const GradcheckOptions& opt) {
  SuiteAccumulator acc("loss_eval");
  for (int i = 0; i < opt.instances; ++i) {
    const int n = uniform_int(rng, 1, 4);
    const int c = uniform_int(rng, 2, 3);
    const int h = uniform_int(rng, 1, 3);
    const int w = uniform_int(rng, 1, 3);
    const int k = uniform_int(rng, 1, 3);
    LamModel model;
    model.class_count = c;
    model.sca = ScaParams::zeros(n, c);
    for (double& v : model.sca.weights) v = uniform(rng, -1.0, 1.0);
    for (double& v : model.sca.bias) v = uniform(rng, 0.0, 0.5);
    for (int l = 0; l < k; ++l) {
      model.optou.alphas.push_back(uniform(rng, 0.5, 1.5));
      model.optou.etas.push_back(uniform(rng, 0.0, 0.5));
    }
    const FeatureTensor features = random_tensor(rng, n, h, w, -1.0, 1.0);
    const LabelMap gt = random_labels(rng, h, w, c, true);

    const LossAndGradient lg = loss_and_gradient(model, features, gt);
    std::vector<double> flat = model.flatten();
    LamModel probe = model;
    for (std::size_t j = 0; j < flat.size(); ++j) {
      auto loss = [&] {
        probe.assign(flat);
        return loss_eval(probe, features, gt);
      };
      acc.compare(lg.gradient[j], central_difference(loss, flat[j], opt.step));
    }
    acc.finish_instance();
  }
  return acc.result();
}

}  // namespace

bool GradcheckReport::passed() const {
  return std::all_of(suites.begin(), suites.end(), [this](const GradcheckSuite& s) {
    return s.max_rel_error <= tolerance;
  });
}

double gradient_rel_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

GradcheckReport run_gradcheck(const GradcheckOptions& options) {
  GradcheckReport report;
  report.tolerance = options.tolerance;
  Rng rng(options.rng_seed);
  report.suites.push_back(check_cross_entropy(rng, options));
  report.suites.push_back(check_sca(rng, options));
  report.suites.push_back(check_cascade(rng, options));
  report.suites.push_back(check_end_to_end(rng, options));
  return report;
}

void write_gradcheck_csv(std::ostream& out, const GradcheckReport& report) {
  out << "suite,instances,components,max_rel_error,status\n";
  for (const GradcheckSuite& s : report.suites) {
    char err[32];
    std::snprintf(err, sizeof(err), "%.3e", s.max_rel_error);
    out << s.name << ',' << s.instances << ',' << s.components << ',' << err << ','
        << (s.max_rel_error <= report.tolerance ? "pass" : "fail") << '\n';
  }
}

}  // namespace lam
