// Copyright 2026 The s2st Authors.
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

#include "s2st/nd/gradcheck.h"

#include <algorithm>
#include <cmath>

#include "s2st/common/error.h"
#include "s2st/nd/autograd.h"

namespace s2st::nd {

FiniteDiffReport FiniteDiffCheckReport(const std::function<Tensor()>& f,
                                       std::span<const Tensor> params, double eps) {
  if (!(eps > 0.0)) throw InvalidArgumentError("finite-difference eps must be positive");
  for (const Tensor& p : params) {
    if (!p.is_leaf()) throw ContractError("finite_diff_check parameters must be leaves");
  }
  const Tensor loss = f();
  if (loss.numel() != 1) throw ContractError("finite_diff_check needs a scalar program");
  {
    NoGradGuard no_grad;
    const double again = f().item();
    if (again != loss.item()) {
      throw DeterminismError("program gave different results on identical inputs");
    }
  }
  const GradientMap grads = Backward(loss);

  FiniteDiffReport report;
  NoGradGuard no_grad;
  for (const Tensor& p : params) {
    Tensor handle = p;
    std::span<double> data = handle.mutable_leaf_data();
    const std::vector<double> analytic = grads.Get(p);
    for (size_t i = 0; i < data.size(); ++i) {
      const double saved = data[i];
      data[i] = saved + eps;
      const double up = f().item();
      data[i] = saved - eps;
      const double down = f().item();
      data[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double denom = std::max({std::fabs(analytic[i]), std::fabs(numeric), 1e-8});
      const double err = std::fabs(analytic[i] - numeric) / denom;
      ++report.entries_checked;
      if (err > report.max_relative_error) {
        report.max_relative_error = err;
        report.worst_param_id = p.id();
        report.worst_index = static_cast<int64_t>(i);
        report.worst_analytic = analytic[i];
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

double FiniteDiffCheck(const std::function<Tensor()>& f, std::span<const Tensor> params,
                       double eps) {
  return FiniteDiffCheckReport(f, params, eps).max_relative_error;
}

}  // namespace s2st::nd
