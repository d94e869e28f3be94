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

#include <armadillo>
#include <cstdint>
#include <string>
#include <utility>

#include "tensorisac/common.hpp"

namespace tisac
{

/// Dense complex third-order tensor.
///
/// Layout (load-bearing, do not change): mode-1 index fastest, then mode-2,
/// then mode-3 — entry (i,j,k) sits at linear offset i + I1*j + I1*I2*k.
/// The mode-1 unfolding X1 is I1 x (I2*I3) with column index j + I2*k, i.e.
/// X1^T stacks I3 blocks of I2 rows. This is exactly the ordering the
/// spatial-smoothing selection matrices assume when they slide over the
/// third index in blocks, so X1 is a zero-copy reinterpretation of the data.
class Tensor3
{
  public:
    Tensor3() = default;
    Tensor3(arma::uword i1, arma::uword i2, arma::uword i3) : data_(i1, i2, i3, arma::fill::zeros) {}
    explicit Tensor3(arma::cx_cube cube) : data_(std::move(cube)) {}

    arma::uword i1() const { return data_.n_rows; }
    arma::uword i2() const { return data_.n_cols; }
    arma::uword i3() const { return data_.n_slices; }
    arma::uword numel() const { return data_.n_elem; }

    cx &operator()(arma::uword i, arma::uword j, arma::uword k) { return data_(i, j, k); }
    cx operator()(arma::uword i, arma::uword j, arma::uword k) const { return data_(i, j, k); }

    const arma::cx_cube &cube() const { return data_; }
    arma::cx_cube &cube() { return data_; }
    const cx *memptr() const { return data_.memptr(); }
    cx *memptr() { return data_.memptr(); }

    double norm() const; ///< Frobenius norm

  private:
    arma::cx_cube data_;
};

/// One factor matrix per mode, shared column count Q.
struct FactorTriple
{
    arma::cx_mat b1, b2, b3;

    int q() const { return static_cast<int>(b1.n_cols); }
    void validate() const; ///< throws std::invalid_argument on column-count mismatch or Q < 1
};

/// Entry (i,j,k) = sum_q b1[i,q] * b2[j,q] * b3[k,q].
Tensor3 cpd_reconstruct(const FactorTriple &f);

/// Mode-n unfolding under the documented layout. The defining identities
/// (all exact, see tests):
///   unfold(t,1)^T = khatri_rao(b3, b2) * b1^T
///   unfold(t,2)^T = khatri_rao(b1, b3) * b2^T
///   unfold(t,3)^T = khatri_rao(b2, b1) * b3^T
/// for t = cpd_reconstruct({b1,b2,b3}).
arma::cx_mat mode_unfold(const Tensor3 &t, int mode);

/// Inverse of mode_unfold for the given target dims.
Tensor3 refold(const arma::cx_mat &m, int mode, arma::uword i1, arma::uword i2, arma::uword i3);

/// Column-wise Kronecker product: column q = kron(a[:,q], b[:,q]), row index
/// i*J + j for a I x Q and b J x Q.
arma::cx_mat khatri_rao(const arma::cx_mat &a, const arma::cx_mat &b);

/// Add i.i.d. circular complex Gaussian noise so that
/// E[ signal energy / noise energy ] = 10^(snr_db/10). Pass snr_db =
/// +infinity to return the tensor unchanged. Returns the noisy tensor and the
/// realized noise energy. Deterministic in the seed.
std::pair<Tensor3, double> add_noise(const Tensor3 &t, double snr_db, std::uint64_t seed);

/// Flat binary fixture format: magic + layout tag + dims + interleaved
/// doubles. save throws on I/O failure; load validates the header.
void save_tensor(const Tensor3 &t, const std::string &path);
Tensor3 load_tensor(const std::string &path);

} // namespace tisac
