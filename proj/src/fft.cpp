#include "ncofdm/fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>
#include <utility>
#include <stdexcept>

namespace ncofdm {

namespace {
// The FFTW planner is not re-entrant.
std::mutex planner_mutex;
}  // namespace

Fft::Fft(int length) : length_(length)
{
    if (length <= 0)
        throw std::invalid_argument("FFT length must be positive");
    std::lock_guard<std::mutex> lock(planner_mutex);
    buffer_ = fftw_alloc_complex(static_cast<std::size_t>(length));
    forward_ = fftw_plan_dft_1d(length, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(length, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() { release(); }

Fft::Fft(Fft&& other) noexcept
    : length_(other.length_), buffer_(other.buffer_), forward_(other.forward_),
      backward_(other.backward_)
{
    other.buffer_ = nullptr;
    other.forward_ = nullptr;
    other.backward_ = nullptr;
}

Fft& Fft::operator=(Fft&& other) noexcept
{
    if (this != &other) {
        release();
        length_ = other.length_;
        buffer_ = std::exchange(other.buffer_, nullptr);
        forward_ = std::exchange(other.forward_, nullptr);
        backward_ = std::exchange(other.backward_, nullptr);
    }
    return *this;
}

void Fft::release() noexcept
{
    std::lock_guard<std::mutex> lock(planner_mutex);
    if (forward_)
        fftw_destroy_plan(forward_);
    if (backward_)
        fftw_destroy_plan(backward_);
    if (buffer_)
        fftw_free(buffer_);
    forward_ = backward_ = nullptr;
    buffer_ = nullptr;
}

void Fft::run(fftw_plan plan, std::span<const std::complex<double>> in,
              std::span<std::complex<double>> out)
{
    if (in.size() != static_cast<std::size_t>(length_) ||
        out.size() != static_cast<std::size_t>(length_))
        throw std::invalid_argument("FFT buffer length mismatch");
    std::memcpy(buffer_, in.data(), sizeof(fftw_complex) * in.size());
    fftw_execute(plan);
    std::memcpy(static_cast<void*>(out.data()), buffer_, sizeof(fftw_complex) * out.size());
}

void Fft::forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out)
{
    run(forward_, in, out);
}

void Fft::backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out)
{
    run(backward_, in, out);
}

}  // namespace ncofdm
