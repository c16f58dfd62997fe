// src/fft.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vigas/fft.h"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "vigas/common.h"

namespace vigas {

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

namespace {

// Plan creation is not thread-safe in FFTW; execution on distinct arrays is.
// Plans are created once per (size, sign) with FFTW_UNALIGNED so they can be
// re-executed on arbitrary caller buffers, and cached for the process
// lifetime.
std::mutex g_plan_mutex;

fftw_plan plan_for(size_t n, int sign) {
  static std::map<std::pair<size_t, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = std::make_pair(n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<cplx> scratch_in(n), scratch_out(n);
  fftw_plan p = fftw_plan_dft_1d(
      static_cast<int>(n), reinterpret_cast<fftw_complex*>(scratch_in.data()),
      reinterpret_cast<fftw_complex*>(scratch_out.data()), sign,
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (p == nullptr) throw NumericalError("fftw plan creation failed");
  cache.emplace(key, p);
  return p;
}

void transform(std::vector<cplx>* buf, int sign) {
  size_t n = buf->size();
  if (n == 0) throw InvalidInput("fft size must be nonzero");
  fftw_plan p = plan_for(n, sign);
  std::vector<cplx> out(n);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(buf->data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  buf->swap(out);
}

}  // namespace

void fft(std::vector<cplx>* buf) { transform(buf, FFTW_FORWARD); }
void ifft(std::vector<cplx>* buf) { transform(buf, FFTW_BACKWARD); }

std::vector<cplx> rfft(const double* x, size_t n, size_t nfft) {
  if (n > nfft) throw InvalidInput("rfft: signal longer than nfft");
  std::vector<cplx> buf(nfft, cplx(0.0, 0.0));
  for (size_t i = 0; i < n; ++i) buf[i] = cplx(x[i], 0.0);
  fft(&buf);
  buf.resize(nfft / 2 + 1);
  return buf;
}

std::vector<double> irfft(const std::vector<cplx>& spec, size_t nfft) {
  if (spec.size() != nfft / 2 + 1)
    throw InvalidInput("irfft: spectrum size does not match nfft");
  std::vector<cplx> buf(nfft);
  for (size_t k = 0; k <= nfft / 2; ++k) buf[k] = spec[k];
  for (size_t k = nfft / 2 + 1; k < nfft; ++k) buf[k] = std::conj(spec[nfft - k]);
  ifft(&buf);
  std::vector<double> out(nfft);
  for (size_t i = 0; i < nfft; ++i) out[i] = buf[i].real() / static_cast<double>(nfft);
  return out;
}

}  // namespace vigas
