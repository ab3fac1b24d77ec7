// Copyright 2026 The propspan Authors.
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

#include <algorithm>

#include "kernels/kernels_impl.h"

namespace propspan {
namespace kernels {
namespace scalar {

double Dot(const double *a, const double *b, size_t n) {
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void Axpy(double alpha, const double *x, double *y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void Scale(double alpha, double *x, size_t n) {
  for (size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double SumSquares(const double *x, size_t n) {
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) sum += x[i] * x[i];
  return sum;
}

double MaxValue(const double *x, size_t n) {
  double best = x[0];
  for (size_t i = 1; i < n; ++i) best = std::max(best, x[i]);
  return best;
}

}  // namespace scalar
}  // namespace kernels
}  // namespace propspan
