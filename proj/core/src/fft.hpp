#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>

#include <fftw3.h>

namespace talagen::detail {

// Real-to-complex transform of a fixed size. Owns its FFTW buffers and plan.
class RealFft {
public:
    explicit RealFft(std::size_t size) : size_(size) {
        in_ = static_cast<double*>(fftw_malloc(sizeof(double) * size));
        out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (size / 2 + 1)));
        std::lock_guard lock(planner_mutex());
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(size), in_, out_, FFTW_ESTIMATE);
    }
    ~RealFft() {
        {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(plan_);
        }
        fftw_free(in_);
        fftw_free(out_);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::size_t size() const noexcept { return size_; }
    std::size_t bins() const noexcept { return size_ / 2 + 1; }
    std::span<double> input() noexcept { return {in_, size_}; }

    void execute() { fftw_execute(plan_); }

    double magnitude(std::size_t k) const {
        return std::abs(std::complex<double>(out_[k][0], out_[k][1]));
    }

private:
    // FFTW planning is not reentrant; execution is.
    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }

    std::size_t size_;
    double* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

}  // namespace talagen::detail
