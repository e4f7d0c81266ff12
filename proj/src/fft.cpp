#include "prnu/fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "prnu/error.hpp"

namespace prnu::fft {

namespace {
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

std::vector<std::complex<double>> forward_r2c(const double* data, int rows, int cols) {
    if (rows <= 0 || cols <= 0) throw Error("fft dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(rows) * cols;
    const std::size_t spec_n = static_cast<std::size_t>(rows) * (cols / 2 + 1);

    std::vector<double> in(data, data + n);  // FFTW may clobber r2c input
    std::vector<std::complex<double>> out(spec_n);

    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan = fftw_plan_dft_r2c_2d(rows, cols, in.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()),
                                    FFTW_ESTIMATE);
    }
    if (!plan) throw Error("fftw r2c planning failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

std::vector<double> inverse_c2r(std::vector<std::complex<double>> spectrum,
                                int rows, int cols) {
    if (rows <= 0 || cols <= 0) throw Error("fft dimensions must be positive");
    const std::size_t spec_n = static_cast<std::size_t>(rows) * (cols / 2 + 1);
    if (spectrum.size() != spec_n) throw Error("fft spectrum size mismatch");

    std::vector<double> out(static_cast<std::size_t>(rows) * cols);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan = fftw_plan_dft_c2r_2d(rows, cols,
                                    reinterpret_cast<fftw_complex*>(spectrum.data()),
                                    out.data(), FFTW_ESTIMATE);
    }
    if (!plan) throw Error("fftw c2r planning failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace prnu::fft
