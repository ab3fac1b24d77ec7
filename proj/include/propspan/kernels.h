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

#ifndef PROPSPAN_KERNELS_H_
#define PROPSPAN_KERNELS_H_

#include <span>
#include <string>

#include "propspan/matrix.h"

namespace propspan {
namespace kernels {

// Dense arithmetic used by the logistic-regression trainers and the stacker.
// Each routine has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The variant is chosen once at startup from CPUID and can
// be pinned with SetIsa(); results agree with the scalar reference to within
// reassociation error (see tests/unit/kernels_test.cc).

enum class Isa { kScalar, kAvx2 };

bool IsaAvailable(Isa isa);
Isa ActiveIsa();
// Throws ConfigError if the ISA is not supported by this CPU or build.
void SetIsa(Isa isa);
const char *IsaName(Isa isa);
// Accepts "scalar", "avx2" and "auto" (best available).
Isa ParseIsa(const std::string &name);

double Dot(std::span<const double> a, std::span<const double> b);
// y += alpha * x
void Axpy(double alpha, std::span<const double> x, std::span<double> y);
void Scale(double alpha, std::span<double> x);
double SumSquares(std::span<const double> x);
// Largest element; x must be non-empty.
double MaxValue(std::span<const double> x);

// y = w^T x, with x.size() == w.rows() and y.size() == w.cols().
void GemvT(const Matrix &w, std::span<const double> x, std::span<double> y);
// w += alpha * x y^T
void Ger(double alpha, std::span<const double> x, std::span<const double> y,
         Matrix &w);

}  // namespace kernels
}  // namespace propspan

#endif  // PROPSPAN_KERNELS_H_
