#ifndef BHLAB_FFT_HPP
#define BHLAB_FFT_HPP

#include <complex>
#include <vector>

namespace bhlab {

// Thin wrapper over FFTW real transforms.  Plans are cached per size behind
// a mutex; execution uses the new-array interface and is reentrant.

/// Forward real-to-complex transform, unnormalized; output has n/2+1 modes.
std::vector<std::complex<double>> fft_forward(const std::vector<double>& in);

/// Inverse complex-to-real transform; divides by n so that
/// fft_inverse(fft_forward(v), n) == v.
std::vector<double> fft_inverse(const std::vector<std::complex<double>>& in, int n);

}  // namespace bhlab

#endif
