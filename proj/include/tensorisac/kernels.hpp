// SPDX-License-Identifier: Apache-2.0
//
// tensorisac - tensor-based channel and target parameter estimation
// for massive MIMO integrated sensing and communication
// Copyright (C) 2026 the tensorisac contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <cstddef>

// Low-level complex-double kernels used by the hot loops (grid correlation
// searches, rank-one tensor accumulation, steering/phase-ramp generation).
// Base:: holds the portable scalar reference implementations; Avx2:: and
// Neon:: hold vectorized variants compiled only on matching targets. The
// top-level tisac::kernels functions dispatch once, at first use, to the best
// variant the running CPU supports. The equivalence tests compare every
// compiled variant against Base at 1e-12 relative tolerance.

namespace tisac::kernels
{

using cx = std::complex<double>;

namespace Base
{
cx cdotc(std::size_t n, const cx *a, const cx *b);              // sum conj(a[i]) * b[i]
void caxpy(std::size_t n, cx s, const cx *x, cx *y);            // y[i] += s * x[i]
void cmul_ew(std::size_t n, const cx *a, const cx *b, cx *out); // out[i] = a[i] * b[i]
double energy(std::size_t n, const cx *a);                      // sum |a[i]|^2
void phase_ramp(std::size_t n, double phi0, double dphi, cx *out); // out[i] = exp(j(phi0 + i*dphi))
} // namespace Base

#ifdef TISAC_HAVE_AVX2
namespace Avx2
{
cx cdotc(std::size_t n, const cx *a, const cx *b);
void caxpy(std::size_t n, cx s, const cx *x, cx *y);
void cmul_ew(std::size_t n, const cx *a, const cx *b, cx *out);
double energy(std::size_t n, const cx *a);
void phase_ramp(std::size_t n, double phi0, double dphi, cx *out);
} // namespace Avx2
#endif

#ifdef TISAC_HAVE_NEON
namespace Neon
{
cx cdotc(std::size_t n, const cx *a, const cx *b);
void caxpy(std::size_t n, cx s, const cx *x, cx *y);
void cmul_ew(std::size_t n, const cx *a, const cx *b, cx *out);
double energy(std::size_t n, const cx *a);
void phase_ramp(std::size_t n, double phi0, double dphi, cx *out);
} // namespace Neon
#endif

// Runtime-dispatched entry points (selected once per process).
cx cdotc(std::size_t n, const cx *a, const cx *b);
void caxpy(std::size_t n, cx s, const cx *x, cx *y);
void cmul_ew(std::size_t n, const cx *a, const cx *b, cx *out);
double energy(std::size_t n, const cx *a);
void phase_ramp(std::size_t n, double phi0, double dphi, cx *out);

/// Name of the active instruction-set variant ("scalar", "avx2", "neon").
const char *active_variant();

} // namespace tisac::kernels
