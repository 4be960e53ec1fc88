#pragma once

// Thin FFTW wrapper. Plans are created once per (dim, n) and shared; FFTW's
// execute functions are thread-safe, the planner is not, so planning is
// serialized.

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "lognls/grid.hpp"

namespace lognls {

class Fft {
 public:
  /// Shared plan pair for grids of this shape.
  static const Fft& for_grid(const Grid& g) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, Fft*> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{g.dim, g.n}];
    if (!slot) slot = new Fft(g.dim, g.n);
    return *slot;
  }

  /// Unnormalized forward transform, out-of-place or in-place.
  void forward(const cdouble* in, cdouble* out) const {
    fftw_execute_dft(in == out ? fwd_inplace_ : fwd_, to_fftw(const_cast<cdouble*>(in)),
                     to_fftw(out));
  }
  /// Unnormalized inverse transform (divide by n^d to invert `forward`).
  void backward(const cdouble* in, cdouble* out) const {
    fftw_execute_dft(in == out ? bwd_inplace_ : bwd_, to_fftw(const_cast<cdouble*>(in)),
                     to_fftw(out));
  }

  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

 private:
  Fft(int dim, int n) {
    int dims[3] = {n, n, n};
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(n);
    std::vector<cdouble> a(total), b(total);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft(dim, dims, to_fftw(a.data()), to_fftw(b.data()), FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft(dim, dims, to_fftw(a.data()), to_fftw(b.data()), FFTW_BACKWARD, flags);
    fwd_inplace_ =
        fftw_plan_dft(dim, dims, to_fftw(a.data()), to_fftw(a.data()), FFTW_FORWARD, flags);
    bwd_inplace_ =
        fftw_plan_dft(dim, dims, to_fftw(a.data()), to_fftw(a.data()), FFTW_BACKWARD, flags);
  }

  static fftw_complex* to_fftw(cdouble* p) { return reinterpret_cast<fftw_complex*>(p); }

  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
  fftw_plan fwd_inplace_ = nullptr;
  fftw_plan bwd_inplace_ = nullptr;
};

}  // namespace lognls
