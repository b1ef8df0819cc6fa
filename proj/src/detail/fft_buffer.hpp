// Copyright 2026 The fastgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fftw3.h>

#include <cstddef>
#include <mutex>

#include "fastgate/full_solver.hpp"

namespace fastgate::detail {

// FFTW's planner is not thread-safe; execution is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// In-place 2D transform pair over one grid. Unnormalized: a forward and
/// a backward transform multiply the data by size().
class FftBuffer {
 public:
  explicit FftBuffer(const MotionalGrid& grid) : size_(grid.size()) {
    data_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * size_));
    auto* raw = reinterpret_cast<fftw_complex*>(data_);
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft_2d(grid.n_c, grid.n_s, raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_2d(grid.n_c, grid.n_s, raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftBuffer() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(data_);
  }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;

  cplx* data() { return data_; }
  std::size_t size() const { return size_; }
  void forward() { fftw_execute(forward_); }
  void backward() { fftw_execute(backward_); }

 private:
  std::size_t size_;
  cplx* data_;
  fftw_plan forward_;
  fftw_plan backward_;
};

}  // namespace fastgate::detail
