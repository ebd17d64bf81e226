#pragma once

#include <memory>

#include "nlsregime/common.hpp"

namespace nlsr {

// 1D complex FFT with numpy conventions:
// forward X_k = sum_j x_j e^{-2 pi i jk/n}, inverse carries the 1/n.
// One object per thread; plan creation is serialized internally.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;

  int size() const { return n_; }
  void forward(const cplx* in, cplx* out);
  void inverse(const cplx* in, cplx* out);
  cvec forward(const cvec& in);
  cvec inverse(const cvec& in);

 private:
  struct Impl;
  int n_;
  std::unique_ptr<Impl> impl_;
};

// Angular frequencies 2 pi fftfreq(n, dx).
rvec fft_frequencies(int n, double dx);

}  // namespace nlsr
