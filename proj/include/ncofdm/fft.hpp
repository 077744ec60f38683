#pragma once

#include <complex>
#include <span>

#include <fftw3.h>

namespace ncofdm {

/// Complex FFT of a fixed length backed by an FFTW plan.
///
/// Both directions are unnormalized, exactly like FFTW:
///   forward:  X[k] = sum_n x[n] e^{-j 2 pi k n / L}
///   backward: x[n] = sum_k X[k] e^{+j 2 pi k n / L}
/// Callers apply their own 1/L where needed.
class Fft {
public:
    explicit Fft(int length);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    Fft(Fft&& other) noexcept;
    Fft& operator=(Fft&& other) noexcept;

    int size() const noexcept { return length_; }

    void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);
    void backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

private:
    void run(fftw_plan plan, std::span<const std::complex<double>> in,
             std::span<std::complex<double>> out);
    void release() noexcept;

    int length_ = 0;
    fftw_complex* buffer_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

}  // namespace ncofdm
