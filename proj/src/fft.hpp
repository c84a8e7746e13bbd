#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace sparsetf::detail {

using cplx = std::complex<double>;

// In-place complex DFT of fixed length backed by FFTW. Forward uses e^{-i...},
// backward is unnormalized. Plans are built with FFTW_ESTIMATE so results do
// not depend on timing; execute() is safe to call concurrently.
class Fft {
public:
    explicit Fft(std::size_t n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    std::size_t size() const { return n_; }
    void forward(std::span<cplx> data) const;
    void backward(std::span<cplx> data) const;

private:
    std::size_t n_;
    void* forward_plan_;
    void* backward_plan_;
};

// Shared plan for length n; plans are kept for the lifetime of the process.
std::shared_ptr<const Fft> cached_fft(std::size_t n);

// Smallest m >= n whose only prime factors are 2, 3 and 5.
std::size_t next_smooth(std::size_t n);

// Signed angular frequency of DFT bin k for a record of length `period`.
double bin_frequency(std::size_t k, std::size_t n, double period);

}  // namespace sparsetf::detail
