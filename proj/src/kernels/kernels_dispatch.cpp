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

#include <cstdlib>
#include <cstring>

namespace tisac::kernels
{

namespace
{

struct dispatch_table
{
    cx (*cdotc)(std::size_t, const cx *, const cx *);
    void (*caxpy)(std::size_t, cx, const cx *, cx *);
    void (*cmul_ew)(std::size_t, const cx *, const cx *, cx *);
    double (*energy)(std::size_t, const cx *);
    void (*phase_ramp)(std::size_t, double, double, cx *);
    const char *name;
};

dispatch_table select()
{
    // TISAC_KERNELS=scalar forces the reference path (useful for comparisons).
    const char *force = std::getenv("TISAC_KERNELS");
    const bool want_scalar = force && std::strcmp(force, "scalar") == 0;
#ifdef TISAC_HAVE_AVX2
    if (!want_scalar && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return {Avx2::cdotc, Avx2::caxpy, Avx2::cmul_ew, Avx2::energy, Avx2::phase_ramp, "avx2"};
#endif
#ifdef TISAC_HAVE_NEON
    if (!want_scalar)
        return {Neon::cdotc, Neon::caxpy, Neon::cmul_ew, Neon::energy, Neon::phase_ramp, "neon"};
#endif
    return {Base::cdotc, Base::caxpy, Base::cmul_ew, Base::energy, Base::phase_ramp, "scalar"};
}

const dispatch_table &table()
{
    static const dispatch_table t = select();
    return t;
}

} // namespace

cx cdotc(std::size_t n, const cx *a, const cx *b) { return table().cdotc(n, a, b); }
void caxpy(std::size_t n, cx s, const cx *x, cx *y) { table().caxpy(n, s, x, y); }
void cmul_ew(std::size_t n, const cx *a, const cx *b, cx *out) { table().cmul_ew(n, a, b, out); }
double energy(std::size_t n, const cx *a) { return table().energy(n, a); }
void phase_ramp(std::size_t n, double phi0, double dphi, cx *out) { table().phase_ramp(n, phi0, dphi, out); }
const char *active_variant() { return table().name; }

} // namespace tisac::kernels
