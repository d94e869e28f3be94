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

#include "tensorisac/tensor3.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include "tensorisac/kernels.hpp"

namespace tisac
{

double Tensor3::norm() const
{
    return std::sqrt(kernels::energy(data_.n_elem, data_.memptr()));
}

void FactorTriple::validate() const
{
    if (b1.n_cols < 1)
        throw std::invalid_argument("FactorTriple: column count must be >= 1");
    if (b2.n_cols != b1.n_cols || b3.n_cols != b1.n_cols)
        throw std::invalid_argument("FactorTriple: factor column counts differ");
}

Tensor3 cpd_reconstruct(const FactorTriple &f)
{
    f.validate();
    const arma::uword i1 = f.b1.n_rows, i2 = f.b2.n_rows, i3 = f.b3.n_rows;
    Tensor3 t(i1, i2, i3);
    for (arma::uword q = 0; q < f.b1.n_cols; ++q)
    {
        const cx *c1 = f.b1.colptr(q);
        for (arma::uword k = 0; k < i3; ++k)
        {
            const cx s3 = f.b3(k, q);
            for (arma::uword j = 0; j < i2; ++j)
                kernels::caxpy(i1, s3 * f.b2(j, q), c1, &t.cube()(0, j, k));
        }
    }
    return t;
}

arma::cx_mat mode_unfold(const Tensor3 &t, int mode)
{
    const arma::uword i1 = t.i1(), i2 = t.i2(), i3 = t.i3();
    switch (mode)
    {
    case 1:
        // column j + I2*k: direct reinterpretation of the memory layout
        return arma::cx_mat(const_cast<cx *>(t.memptr()), i1, i2 * i3, true, false);
    case 2:
    {
        // X2[j, i*I3 + k] = t(i,j,k)
        arma::cx_mat m(i2, i1 * i3);
        for (arma::uword i = 0; i < i1; ++i)
            for (arma::uword k = 0; k < i3; ++k)
                for (arma::uword j = 0; j < i2; ++j)
                    m(j, i * i3 + k) = t(i, j, k);
        return m;
    }
    case 3:
    {
        // X3[k, j*I1 + i] = t(i,j,k); X3^T is the I1*I2 x I3 memory reshape
        arma::cx_mat m(i3, i1 * i2);
        const cx *p = t.memptr();
        for (arma::uword k = 0; k < i3; ++k)
            for (arma::uword c = 0; c < i1 * i2; ++c)
                m(k, c) = p[k * i1 * i2 + c];
        return m;
    }
    default:
        throw std::invalid_argument("mode_unfold: mode must be 1, 2 or 3");
    }
}

Tensor3 refold(const arma::cx_mat &m, int mode, arma::uword i1, arma::uword i2, arma::uword i3)
{
    Tensor3 t(i1, i2, i3);
    switch (mode)
    {
    case 1:
        if (m.n_rows != i1 || m.n_cols != i2 * i3)
            throw std::invalid_argument("refold: mode-1 shape mismatch");
        std::memcpy(t.memptr(), m.memptr(), sizeof(cx) * m.n_elem);
        return t;
    case 2:
        if (m.n_rows != i2 || m.n_cols != i1 * i3)
            throw std::invalid_argument("refold: mode-2 shape mismatch");
        for (arma::uword i = 0; i < i1; ++i)
            for (arma::uword k = 0; k < i3; ++k)
                for (arma::uword j = 0; j < i2; ++j)
                    t(i, j, k) = m(j, i * i3 + k);
        return t;
    case 3:
        if (m.n_rows != i3 || m.n_cols != i1 * i2)
            throw std::invalid_argument("refold: mode-3 shape mismatch");
        for (arma::uword k = 0; k < i3; ++k)
            for (arma::uword c = 0; c < i1 * i2; ++c)
                t.memptr()[k * i1 * i2 + c] = m(k, c);
        return t;
    default:
        throw std::invalid_argument("refold: mode must be 1, 2 or 3");
    }
}

arma::cx_mat khatri_rao(const arma::cx_mat &a, const arma::cx_mat &b)
{
    if (a.n_cols != b.n_cols)
        throw std::invalid_argument("khatri_rao: column counts differ");
    const arma::uword ia = a.n_rows, jb = b.n_rows, q = a.n_cols;
    arma::cx_mat out(ia * jb, q, arma::fill::none);
    for (arma::uword c = 0; c < q; ++c)
    {
        cx *col = out.colptr(c);
        const cx *bc = b.colptr(c);
        for (arma::uword i = 0; i < ia; ++i)
        {
            const cx s = a(i, c);
            for (arma::uword j = 0; j < jb; ++j)
                col[i * jb + j] = s * bc[j];
        }
    }
    return out;
}

std::pair<Tensor3, double> add_noise(const Tensor3 &t, double snr_db, std::uint64_t seed)
{
    if (std::isinf(snr_db) && snr_db > 0)
        return {t, 0.0};
    const double sig_energy = kernels::energy(t.numel(), t.memptr());
    if (sig_energy == 0.0)
        throw std::invalid_argument("add_noise: zero tensor");
    const double var = sig_energy / (std::pow(10.0, snr_db / 10.0) * static_cast<double>(t.numel()));
    std::mt19937_64 rng(derive_seed(seed, 0xA015Eu));
    std::normal_distribution<double> g(0.0, std::sqrt(0.5 * var));
    Tensor3 out = t;
    double noise_energy = 0.0;
    cx *p = out.memptr();
    for (arma::uword i = 0; i < out.numel(); ++i)
    {
        const cx n(g(rng), g(rng));
        noise_energy += std::norm(n);
        p[i] += n;
    }
    return {out, noise_energy};
}

// ---------- fixture I/O ----------

namespace
{
constexpr char magic[8] = {'T', 'I', 'S', 'A', 'C', 'T', '3', '\0'}; // format id
constexpr std::uint32_t layout_tag = 1;                              // mode-1 fastest
} // namespace

void save_tensor(const Tensor3 &t, const std::string &path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::invalid_argument("save_tensor: cannot open " + path);
    f.write(magic, 8);
    std::uint32_t tag = layout_tag;
    std::uint64_t dims[3] = {t.i1(), t.i2(), t.i3()};
    f.write(reinterpret_cast<const char *>(&tag), sizeof(tag));
    f.write(reinterpret_cast<const char *>(dims), sizeof(dims));
    f.write(reinterpret_cast<const char *>(t.memptr()), sizeof(cx) * t.numel());
    if (!f)
        throw std::invalid_argument("save_tensor: write failed for " + path);
}

Tensor3 load_tensor(const std::string &path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::invalid_argument("load_tensor: cannot open " + path);
    char m[8];
    std::uint32_t tag = 0;
    std::uint64_t dims[3] = {0, 0, 0};
    f.read(m, 8);
    f.read(reinterpret_cast<char *>(&tag), sizeof(tag));
    f.read(reinterpret_cast<char *>(dims), sizeof(dims));
    if (!f || std::memcmp(m, magic, 8) != 0 || tag != layout_tag)
        throw std::invalid_argument("load_tensor: bad header in " + path);
    Tensor3 t(dims[0], dims[1], dims[2]);
    f.read(reinterpret_cast<char *>(t.memptr()), sizeof(cx) * t.numel());
    if (!f)
        throw std::invalid_argument("load_tensor: truncated data in " + path);
    return t;
}

} // namespace tisac
