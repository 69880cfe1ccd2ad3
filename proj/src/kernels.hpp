// Copyright 2026 The mitiknit Authors
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

#pragma once

// Bit-addressed kernels over flat amplitude arrays. A density matrix of N
// qubits is handled as a 2N-bit array (row bits 0..N-1, column bits N..2N-1).

#include <complex>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace mitiknit::kernels {

using Complex = std::complex<double>;

inline void apply_matrix(std::span<Complex> d, int bit, const Eigen::Matrix2cd& m) {
  const std::size_t stride = std::size_t{1} << bit;
  const Complex m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
  for (std::size_t base = 0; base < d.size(); base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const Complex a = d[i];
      const Complex b = d[i + stride];
      d[i] = m00 * a + m01 * b;
      d[i + stride] = m10 * a + m11 * b;
    }
  }
}

inline void apply_diagonal(std::span<Complex> d, int bit, Complex d0, Complex d1) {
  const std::size_t stride = std::size_t{1} << bit;
  for (std::size_t base = 0; base < d.size(); base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      d[i] *= d0;
      d[i + stride] *= d1;
    }
  }
}

/// Multiplies entry i by phase[(bit a of i) + 2 * (bit b of i)].
inline void apply_diagonal2(std::span<Complex> d, int bit_a, int bit_b, const Complex (&phase)[4]) {
  const std::size_t ma = std::size_t{1} << bit_a;
  const std::size_t mb = std::size_t{1} << bit_b;
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] *= phase[((i & ma) ? 1 : 0) + ((i & mb) ? 2 : 0)];
  }
}

inline void apply_flip(std::span<Complex> d, int bit) {
  const std::size_t stride = std::size_t{1} << bit;
  for (std::size_t base = 0; base < d.size(); base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) std::swap(d[i], d[i + stride]);
  }
}

/// Swaps target bit on indices whose control bit is set.
inline void apply_controlled_flip(std::span<Complex> d, int control, int target) {
  const std::size_t cm = std::size_t{1} << control;
  const std::size_t tm = std::size_t{1} << target;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if ((i & cm) && !(i & tm)) std::swap(d[i], d[i | tm]);
  }
}

/// Zeroes every entry whose `bit` differs from `keep`.
inline void apply_projector(std::span<Complex> d, int bit, bool keep) {
  const std::size_t stride = std::size_t{1} << bit;
  const std::size_t off = keep ? 0 : stride;
  for (std::size_t base = 0; base < d.size(); base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) d[i + off] = 0.0;
  }
}

/// Depolarizing channel on the (row_bit, col_bit) pair of a vectorized
/// density matrix.
inline void apply_depolarizing(std::span<Complex> d, int row_bit, int col_bit, double rate) {
  const std::size_t rm = std::size_t{1} << row_bit;
  const std::size_t cm = std::size_t{1} << col_bit;
  const double keep = 1.0 - 0.5 * rate;
  const double move = 0.5 * rate;
  const double off = 1.0 - rate;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i & (rm | cm)) continue;
    const Complex a = d[i];
    const Complex b = d[i | rm | cm];
    d[i] = keep * a + move * b;
    d[i | rm | cm] = keep * b + move * a;
    d[i | rm] *= off;
    d[i | cm] *= off;
  }
}

}  // namespace mitiknit::kernels
