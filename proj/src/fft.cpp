#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>

#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace sparsetf::detail {

namespace {
// The FFTW planner is not re-entrant.
std::mutex planner_mutex;
}  // namespace

Fft::Fft(std::size_t n) : n_(n), forward_plan_(nullptr), backward_plan_(nullptr) {
    if (n == 0) throw std::invalid_argument("FFT length must be positive");
    std::lock_guard lock(planner_mutex);
    auto* buf = fftw_alloc_complex(n);
    const int len = static_cast<int>(n);
    forward_plan_ = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward_plan_ = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!forward_plan_ || !backward_plan_) throw std::runtime_error("FFTW planning failed");
}

Fft::~Fft() {
    std::lock_guard lock(planner_mutex);
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void Fft::forward(std::span<cplx> data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), p, p);
}

void Fft::backward(std::span<cplx> data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), p, p);
}

std::shared_ptr<const Fft> cached_fft(std::size_t n) {
    static std::mutex cache_mutex;
    static std::map<std::size_t, std::shared_ptr<const Fft>> cache;
    std::lock_guard lock(cache_mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_shared<const Fft>(n);
    return slot;
}

std::size_t next_smooth(std::size_t n) {
    for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
        std::size_t k = m;
        for (std::size_t p : {2, 3, 5})
            while (k % p == 0) k /= p;
        if (k == 1) return m;
    }
}

double bin_frequency(std::size_t k, std::size_t n, double period) {
    const auto kk = static_cast<double>(k);
    const auto nn = static_cast<double>(n);
    const double signed_k = (2 * k < n) ? kk : kk - nn;
    return 2.0 * std::numbers::pi * signed_k / period;
}

}  // namespace sparsetf::detail
