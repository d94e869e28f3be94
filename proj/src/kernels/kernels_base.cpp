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

#include "tensorisac/kernels.hpp"

#include <cmath>

namespace tisac::kernels::Base
{

cx cdotc(std::size_t n, const cx *a, const cx *b)
{
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        // conj(a) * b expanded to keep the scalar loop auto-vectorizer friendly
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

void caxpy(std::size_t n, cx s, const cx *x, cx *y)
{
    const double sr = s.real(), si = s.imag();
    for (std::size_t i = 0; i < n; ++i)
    {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] += cx(sr * xr - si * xi, sr * xi + si * xr);
    }
}

void cmul_ew(std::size_t n, const cx *a, const cx *b, cx *out)
{
    for (std::size_t i = 0; i < n; ++i)
    {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out[i] = cx(ar * br - ai * bi, ar * bi + ai * br);
    }
}

double energy(std::size_t n, const cx *a)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    return acc;
}

void phase_ramp(std::size_t n, double phi0, double dphi, cx *out)
{
    // Incremental rotation with periodic resync against libm; the recurrence
    // alone accumulates O(n*eps) drift, the resync keeps the worst element
    // below ~1e-14 for any n used here (<= a few thousand).
    constexpr std::size_t resync = 64;
    const cx w(std::cos(dphi), std::sin(dphi));
    cx v(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i)
    {
        if (i % resync == 0)
        {
            const double p = phi0 + dphi * static_cast<double>(i);
            v = cx(std::cos(p), std::sin(p));
        }
        out[i] = v;
        v *= w;
    }
}

} // namespace tisac::kernels::Base
