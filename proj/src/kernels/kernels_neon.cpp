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

#ifdef TISAC_HAVE_NEON

#include <arm_neon.h>
#include <cmath>

// One complex double per 128-bit register, (re, im).

namespace tisac::kernels::Neon
{

static inline float64x2_t cmul(float64x2_t a, float64x2_t b)
{
    // (ar*br - ai*bi, ar*bi + ai*br)
    float64x2_t b_re = vdupq_laneq_f64(b, 0);
    float64x2_t b_im = vdupq_laneq_f64(b, 1);
    float64x2_t a_sw = vextq_f64(a, a, 1);                 // (ai, ar)
    float64x2_t t = vmulq_f64(a_sw, b_im);                 // (ai*bi, ar*bi)
    const float64x2_t sign = {-1.0, 1.0};
    return vfmaq_f64(vmulq_f64(t, sign), a, b_re);
}

cx cdotc(std::size_t n, const cx *a, const cx *b)
{
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        float64x2_t va = vld1q_f64(reinterpret_cast<const double *>(a + i));
        float64x2_t vb = vld1q_f64(reinterpret_cast<const double *>(b + i));
        float64x2_t pr = vmulq_f64(va, vb);                // (ar*br, ai*bi)
        float64x2_t va_sw = vextq_f64(va, va, 1);
        float64x2_t pi = vmulq_f64(va_sw, vb);             // (ai*br, ar*bi)
        re += vaddvq_f64(pr);
        im += vgetq_lane_f64(pi, 1) - vgetq_lane_f64(pi, 0);
    }
    return {re, im};
}

void caxpy(std::size_t n, cx s, const cx *x, cx *y)
{
    const float64x2_t vs = vld1q_f64(reinterpret_cast<const double *>(&s));
    for (std::size_t i = 0; i < n; ++i)
    {
        float64x2_t vx = vld1q_f64(reinterpret_cast<const double *>(x + i));
        float64x2_t vy = vld1q_f64(reinterpret_cast<double *>(y + i));
        vst1q_f64(reinterpret_cast<double *>(y + i), vaddq_f64(vy, cmul(vx, vs)));
    }
}

void cmul_ew(std::size_t n, const cx *a, const cx *b, cx *out)
{
    for (std::size_t i = 0; i < n; ++i)
    {
        float64x2_t va = vld1q_f64(reinterpret_cast<const double *>(a + i));
        float64x2_t vb = vld1q_f64(reinterpret_cast<const double *>(b + i));
        vst1q_f64(reinterpret_cast<double *>(out + i), cmul(va, vb));
    }
}

double energy(std::size_t n, const cx *a)
{
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n; ++i)
    {
        float64x2_t v = vld1q_f64(reinterpret_cast<const double *>(a + i));
        acc = vfmaq_f64(acc, v, v);
    }
    return vaddvq_f64(acc);
}

void phase_ramp(std::size_t n, double phi0, double dphi, cx *out)
{
    constexpr std::size_t resync = 64;
    const cx w(std::cos(dphi), std::sin(dphi));
    const float64x2_t vw = vld1q_f64(reinterpret_cast<const double *>(&w));
    float64x2_t v = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n; ++i)
    {
        if (i % resync == 0)
        {
            const double p = phi0 + dphi * static_cast<double>(i);
            const cx seed(std::cos(p), std::sin(p));
            v = vld1q_f64(reinterpret_cast<const double *>(&seed));
        }
        vst1q_f64(reinterpret_cast<double *>(out + i), v);
        v = cmul(v, vw);
    }
}

} // namespace tisac::kernels::Neon

#endif // TISAC_HAVE_NEON
