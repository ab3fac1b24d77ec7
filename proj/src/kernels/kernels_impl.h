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

#ifndef PROPSPAN_SRC_KERNELS_KERNELS_IMPL_H_
#define PROPSPAN_SRC_KERNELS_KERNELS_IMPL_H_

#include <cstddef>

// Per-ISA entry points. Exposed so the equivalence tests can call each
// variant directly, bypassing dispatch.

namespace propspan {
namespace kernels {

struct KernelTable {
  double (*dot)(const double *a, const double *b, size_t n);
  void (*axpy)(double alpha, const double *x, double *y, size_t n);
  void (*scale)(double alpha, double *x, size_t n);
  double (*sum_squares)(const double *x, size_t n);
  double (*max_value)(const double *x, size_t n);
};

namespace scalar {
double Dot(const double *a, const double *b, size_t n);
void Axpy(double alpha, const double *x, double *y, size_t n);
void Scale(double alpha, double *x, size_t n);
double SumSquares(const double *x, size_t n);
double MaxValue(const double *x, size_t n);
}  // namespace scalar

#if defined(PROPSPAN_HAVE_AVX2)
namespace avx2 {
double Dot(const double *a, const double *b, size_t n);
void Axpy(double alpha, const double *x, double *y, size_t n);
void Scale(double alpha, double *x, size_t n);
double SumSquares(const double *x, size_t n);
double MaxValue(const double *x, size_t n);
}  // namespace avx2
#endif

}  // namespace kernels
}  // namespace propspan

#endif  // PROPSPAN_SRC_KERNELS_KERNELS_IMPL_H_
