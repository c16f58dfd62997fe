// include/vigas/fft.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_FFT_H_
#define VIGAS_FFT_H_

#include <complex>
#include <cstddef>
#include <vector>

namespace vigas {

using cplx = std::complex<double>;

size_t next_pow2(size_t n);

// Unnormalized forward DFT, X[k] = sum_n x[n] e^{-2pi i kn/N}. Any N >= 1.
void fft(std::vector<cplx>* buf);
// Unnormalized inverse DFT, x[n] = sum_k X[k] e^{+2pi i kn/N} (no 1/N).
void ifft(std::vector<cplx>* buf);

// One-sided spectrum of a real signal zero-padded to nfft.
// Returns nfft/2 + 1 bins.
std::vector<cplx> rfft(const double* x, size_t n, size_t nfft);
// Inverse of rfft assuming a hermitian full spectrum; returns nfft reals,
// normalized by 1/nfft.
std::vector<double> irfft(const std::vector<cplx>& spec, size_t nfft);

}  // namespace vigas

#endif  // VIGAS_FFT_H_
