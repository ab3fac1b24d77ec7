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
#include <atomic>

#include "kernels/kernels_impl.h"
#include "propspan/errors.h"
#include "propspan/kernels.h"

namespace propspan {
namespace kernels {

namespace {

constexpr KernelTable kScalarTable = {scalar::Dot, scalar::Axpy, scalar::Scale,
                                      scalar::SumSquares, scalar::MaxValue};
#if defined(PROPSPAN_HAVE_AVX2)
constexpr KernelTable kAvx2Table = {avx2::Dot, avx2::Axpy, avx2::Scale,
                                    avx2::SumSquares, avx2::MaxValue};
#endif

bool CpuHasAvx2() {
#if defined(PROPSPAN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa BestIsa() { return CpuHasAvx2() ? Isa::kAvx2 : Isa::kScalar; }

std::atomic<Isa> &ActiveSlot() {
  static std::atomic<Isa> active{BestIsa()};
  return active;
}

const KernelTable &Table() {
#if defined(PROPSPAN_HAVE_AVX2)
  if (ActiveSlot().load(std::memory_order_relaxed) == Isa::kAvx2) {
    return kAvx2Table;
  }
#endif
  return kScalarTable;
}

void CheckSameSize(size_t a, size_t b, const char *op) {
  if (a != b) {
    throw ContractViolation(std::string(op) + ": length mismatch " +
                            std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

bool IsaAvailable(Isa isa) {
  return isa == Isa::kScalar || (isa == Isa::kAvx2 && CpuHasAvx2());
}

Isa ActiveIsa() { return ActiveSlot().load(); }

void SetIsa(Isa isa) {
  if (!IsaAvailable(isa)) {
    throw ConfigError(std::string("kernel ISA not available: ") + IsaName(isa));
  }
  ActiveSlot().store(isa);
}

const char *IsaName(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

Isa ParseIsa(const std::string &name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  if (name == "auto") return BestIsa();
  throw ConfigError("unknown kernel ISA '" + name + "'");
}

double Dot(std::span<const double> a, std::span<const double> b) {
  CheckSameSize(a.size(), b.size(), "Dot");
  return Table().dot(a.data(), b.data(), a.size());
}

void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  CheckSameSize(x.size(), y.size(), "Axpy");
  Table().axpy(alpha, x.data(), y.data(), x.size());
}

void Scale(double alpha, std::span<double> x) {
  Table().scale(alpha, x.data(), x.size());
}

double SumSquares(std::span<const double> x) {
  return Table().sum_squares(x.data(), x.size());
}

double MaxValue(std::span<const double> x) {
  if (x.empty()) throw ContractViolation("MaxValue: empty input");
  return Table().max_value(x.data(), x.size());
}

void GemvT(const Matrix &w, std::span<const double> x, std::span<double> y) {
  CheckSameSize(x.size(), w.rows(), "GemvT");
  CheckSameSize(y.size(), w.cols(), "GemvT");
  const KernelTable &table = Table();
  std::fill(y.begin(), y.end(), 0.0);
  for (size_t r = 0; r < w.rows(); ++r) {
    if (x[r] != 0.0) table.axpy(x[r], w.row(r).data(), y.data(), y.size());
  }
}

void Ger(double alpha, std::span<const double> x, std::span<const double> y,
         Matrix &w) {
  CheckSameSize(x.size(), w.rows(), "Ger");
  CheckSameSize(y.size(), w.cols(), "Ger");
  const KernelTable &table = Table();
  for (size_t r = 0; r < w.rows(); ++r) {
    const double a = alpha * x[r];
    if (a != 0.0) table.axpy(a, y.data(), w.row(r).data(), y.size());
  }
}

}  // namespace kernels
}  // namespace propspan
