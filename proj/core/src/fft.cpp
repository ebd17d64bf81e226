#include "nlsregime/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace nlsr {

namespace {
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fft::Impl {
  fftw_complex* buf_in = nullptr;
  fftw_complex* buf_out = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  ~Impl() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (buf_in) fftw_free(buf_in);
    if (buf_out) fftw_free(buf_out);
  }
};

Fft::Fft(int n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n <= 0) throw Error("Fft: size must be positive");
  std::lock_guard<std::mutex> lock(plan_mutex());
  impl_->buf_in = fftw_alloc_complex(n);
  impl_->buf_out = fftw_alloc_complex(n);
  impl_->fwd = fftw_plan_dft_1d(n, impl_->buf_in, impl_->buf_out, FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_dft_1d(n, impl_->buf_in, impl_->buf_out, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!impl_->fwd || !impl_->bwd) throw Error("Fft: plan creation failed");
}

Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::forward(const cplx* in, cplx* out) {
  std::memcpy(impl_->buf_in, in, sizeof(cplx) * n_);
  fftw_execute(impl_->fwd);
  std::memcpy(out, impl_->buf_out, sizeof(cplx) * n_);
}

void Fft::inverse(const cplx* in, cplx* out) {
  std::memcpy(impl_->buf_in, in, sizeof(cplx) * n_);
  fftw_execute(impl_->bwd);
  const double s = 1.0 / n_;
  auto* o = reinterpret_cast<const cplx*>(impl_->buf_out);
  for (int i = 0; i < n_; ++i) out[i] = o[i] * s;
}

cvec Fft::forward(const cvec& in) {
  cvec out(n_);
  forward(in.data(), out.data());
  return out;
}

cvec Fft::inverse(const cvec& in) {
  cvec out(n_);
  inverse(in.data(), out.data());
  return out;
}

rvec fft_frequencies(int n, double dx) {
  rvec f(n);
  for (int i = 0; i < n; ++i) {
    const int m = (i < (n + 1) / 2) ? i : i - n;
    f[i] = kTwoPi * m / (n * dx);
  }
  return f;
}

}  // namespace nlsr
