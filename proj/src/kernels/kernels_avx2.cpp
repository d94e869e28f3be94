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

#ifdef TISAC_HAVE_AVX2

#include <cmath>
#include <immintrin.h>

// Two complex doubles per 256-bit lane, interleaved (re, im, re, im).

namespace tisac::kernels::Avx2
{

static inline __m256d cmul(__m256d a, __m256d b)
{
    __m256d b_re = _mm256_movedup_pd(b);
    __m256d b_im = _mm256_permute_pd(b, 0xF);
    __m256d a_sw = _mm256_permute_pd(a, 0x5);
    return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

cx cdotc(std::size_t n, const cx *a, const cx *b)
{
    const double *pa = reinterpret_cast<const double *>(a);
    const double *pb = reinterpret_cast<const double *>(b);
    __m256d accr = _mm256_setzero_pd(); // (ar*br, ai*bi, ...)
    __m256d acci = _mm256_setzero_pd(); // (ai*br, ar*bi, ...)
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
    {
        __m256d va = _mm256_loadu_pd(pa + 2 * i);
        __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        __m256d va_sw = _mm256_permute_pd(va, 0x5);
        accr = _mm256_fmadd_pd(va, vb, accr);
        acci = _mm256_fmadd_pd(va_sw, vb, acci);
    }
    alignas(32) double r[4], q[4];
    _mm256_store_pd(r, accr);
    _mm256_store_pd(q, acci);
    double re = r[0] + r[1] + r[2] + r[3];
    double im = (q[1] + q[3]) - (q[0] + q[2]);
    for (; i < n; ++i)
    {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

void caxpy(std::size_t n, cx s, const cx *x, cx *y)
{
    const double *px = reinterpret_cast<const double *>(x);
    double *py = reinterpret_cast<double *>(y);
    const __m256d s_re = _mm256_set1_pd(s.real());
    const __m256d s_im = _mm256_set1_pd(s.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
    {
        __m256d vx = _mm256_loadu_pd(px + 2 * i);
        __m256d vx_sw = _mm256_permute_pd(vx, 0x5);
        __m256d prod = _mm256_fmaddsub_pd(vx, s_re, _mm256_mul_pd(vx_sw, s_im));
        __m256d vy = _mm256_loadu_pd(py + 2 * i);
        _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(vy, prod));
    }
    for (; i < n; ++i)
    {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] += cx(s.real() * xr - s.imag() * xi, s.real() * xi + s.imag() * xr);
    }
}

void cmul_ew(std::size_t n, const cx *a, const cx *b, cx *out)
{
    const double *pa = reinterpret_cast<const double *>(a);
    const double *pb = reinterpret_cast<const double *>(b);
    double *po = reinterpret_cast<double *>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        _mm256_storeu_pd(po + 2 * i, cmul(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i)));
    for (; i < n; ++i)
    {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out[i] = cx(ar * br - ai * bi, ar * bi + ai * br);
    }
}

double energy(std::size_t n, const cx *a)
{
    const double *pa = reinterpret_cast<const double *>(a);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
    {
        __m256d v = _mm256_loadu_pd(pa + 2 * i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    alignas(32) double r[4];
    _mm256_store_pd(r, acc);
    double e = r[0] + r[1] + r[2] + r[3];
    for (; i < n; ++i)
        e += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    return e;
}

void phase_ramp(std::size_t n, double phi0, double dphi, cx *out)
{
    double *po = reinterpret_cast<double *>(out);
    const double c2 = std::cos(2.0 * dphi), s2 = std::sin(2.0 * dphi);
    const __m256d w2 = _mm256_setr_pd(c2, s2, c2, s2);
    constexpr std::size_t resync = 64; // vector steps between libm refreshes
    std::size_t i = 0, step = 0;
    __m256d v = _mm256_setzero_pd();
    for (; i + 2 <= n; i += 2, ++step)
    {
        if (step % resync == 0)
        {
            const double p0 = phi0 + dphi * static_cast<double>(i);
            const double p1 = p0 + dphi;
            v = _mm256_setr_pd(std::cos(p0), std::sin(p0), std::cos(p1), std::sin(p1));
        }
        _mm256_storeu_pd(po + 2 * i, v);
        v = cmul(v, w2);
    }
    for (; i < n; ++i)
    {
        const double p = phi0 + dphi * static_cast<double>(i);
        out[i] = cx(std::cos(p), std::sin(p));
    }
}

} // namespace tisac::kernels::Avx2

#endif // TISAC_HAVE_AVX2
