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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "kernels/kernels_impl.h"
#include "propspan/errors.h"
#include "propspan/kernels.h"
#include "test_support.h"

namespace propspan {
namespace {

std::vector<double> RandomVector(std::mt19937_64 &rng, size_t n) {
  std::vector<double> v(n);
  for (double &x : v) x = testing::Uniform(rng, -3.0, 3.0);
  return v;
}

// Restores the dispatch choice after a test changes it.
struct IsaGuard {
  kernels::Isa saved = kernels::ActiveIsa();
  ~IsaGuard() { kernels::SetIsa(saved); }
};

TEST_SUITE("kernels") {

TEST_CASE("scalar kernels against plain loops") {
  std::mt19937_64 rng(41);
  for (size_t n = 1; n < 40; ++n) {
    const auto a = RandomVector(rng, n), b = RandomVector(rng, n);
    double dot = 0.0, sq = 0.0, mx = a[0];
    for (size_t i = 0; i < n; ++i) {
      dot += a[i] * b[i];
      sq += a[i] * a[i];
      mx = std::max(mx, a[i]);
    }
    CHECK(kernels::scalar::Dot(a.data(), b.data(), n) == dot);
    CHECK(kernels::scalar::SumSquares(a.data(), n) == sq);
    CHECK(kernels::scalar::MaxValue(a.data(), n) == mx);
  }
}

#if defined(PROPSPAN_HAVE_AVX2)
TEST_CASE("avx2 kernels match scalar") {
  if (!kernels::IsaAvailable(kernels::Isa::kAvx2)) {
    MESSAGE("AVX2/FMA not available on this machine; skipping");
    return;
  }
  std::mt19937_64 rng(42);
  for (size_t n = 1; n < 131; ++n) {
    const auto a = RandomVector(rng, n), b = RandomVector(rng, n);
    double magnitude = 0.0;
    for (size_t i = 0; i < n; ++i) magnitude += std::abs(a[i] * b[i]);
    const double tol = 1e-14 * std::max(1.0, magnitude);
    CHECK(std::abs(kernels::avx2::Dot(a.data(), b.data(), n) -
                   kernels::scalar::Dot(a.data(), b.data(), n)) <= tol);
    double sq_mag = 0.0;
    for (double x : a) sq_mag += x * x;
    CHECK(std::abs(kernels::avx2::SumSquares(a.data(), n) -
                   kernels::scalar::SumSquares(a.data(), n)) <= 1e-14 * std::max(1.0, sq_mag));
    CHECK(kernels::avx2::MaxValue(a.data(), n) == kernels::scalar::MaxValue(a.data(), n));

    auto ys = b, yv = b;
    kernels::scalar::Axpy(0.75, a.data(), ys.data(), n);
    kernels::avx2::Axpy(0.75, a.data(), yv.data(), n);
    for (size_t i = 0; i < n; ++i) CHECK(std::abs(ys[i] - yv[i]) <= 1e-15 * 8.0);

    auto xs = a, xv = a;
    kernels::scalar::Scale(-1.25, xs.data(), n);
    kernels::avx2::Scale(-1.25, xv.data(), n);
    CHECK(xs == xv);
  }
}
#endif

TEST_CASE("dispatch selection") {
  IsaGuard guard;
  CHECK(kernels::ParseIsa("scalar") == kernels::Isa::kScalar);
  CHECK(kernels::ParseIsa("avx2") == kernels::Isa::kAvx2);
  CHECK_THROWS_AS(kernels::ParseIsa("neon"), ConfigError);
  CHECK(kernels::IsaAvailable(kernels::Isa::kScalar));
  kernels::SetIsa(kernels::Isa::kScalar);
  CHECK(kernels::ActiveIsa() == kernels::Isa::kScalar);
  CHECK(std::string(kernels::IsaName(kernels::ActiveIsa())) == "scalar");
  if (!kernels::IsaAvailable(kernels::Isa::kAvx2)) {
    CHECK_THROWS_AS(kernels::SetIsa(kernels::Isa::kAvx2), ConfigError);
  }
}

TEST_CASE("public wrappers on every available isa") {
  IsaGuard guard;
  std::mt19937_64 rng(43);
  for (kernels::Isa isa : {kernels::Isa::kScalar, kernels::Isa::kAvx2}) {
    if (!kernels::IsaAvailable(isa)) continue;
    kernels::SetIsa(isa);
    const Matrix w = testing::RandomMatrix(rng, 7, 5, 1.0);
    const auto x = RandomVector(rng, 7);
    std::vector<double> y(5, 0.0);
    kernels::GemvT(w, x, y);
    for (size_t c = 0; c < 5; ++c) {
      double expect = 0.0;
      for (size_t r = 0; r < 7; ++r) expect += w(r, c) * x[r];
      CHECK(y[c] == doctest::Approx(expect).epsilon(1e-13));
    }
    Matrix g(7, 5);
    const auto v = RandomVector(rng, 5);
    kernels::Ger(0.5, x, v, g);
    for (size_t r = 0; r < 7; ++r) {
      for (size_t c = 0; c < 5; ++c) CHECK(g(r, c) == doctest::Approx(0.5 * x[r] * v[c]));
    }
    CHECK_THROWS_AS(kernels::Dot(x, v), ContractViolation);
  }
}

}  // TEST_SUITE

}  // namespace
}  // namespace propspan
