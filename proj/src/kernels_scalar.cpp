#include "prnu/kernels.hpp"

#include <algorithm>

// Reference implementations. These define the semantics the vector
// variants are tested against.

namespace prnu::kernels {
namespace {

void subtract_scalar(double* out, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void axpy_scalar(double* y, const double* x, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double* x, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= s;
}

void square_scalar(double* out, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * x[i];
}

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double sumsq_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void var_floor_scalar(double* v, const double* m, double noise_var, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) v[i] = std::max(0.0, m[i] - noise_var);
}

void var_floor_min_scalar(double* v, const double* m, double noise_var, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        v[i] = std::min(v[i], std::max(0.0, m[i] - noise_var));
}

void wiener_gain_scalar(double* x, const double* v, double noise_var, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= v[i] / (v[i] + noise_var);
}

void deinterleave2_scalar(double* even, double* odd, const double* x,
                          std::size_t npairs) {
    for (std::size_t i = 0; i < npairs; ++i) {
        even[i] = x[2 * i];
        odd[i] = x[2 * i + 1];
    }
}

void cmul_conj_scalar(double* out, const double* a, const double* b,
                      std::size_t ncomplex) {
    for (std::size_t i = 0; i < ncomplex; ++i) {
        const double ar = a[2 * i], ai = a[2 * i + 1];
        const double br = b[2 * i], bi = b[2 * i + 1];
        out[2 * i] = ar * br + ai * bi;
        out[2 * i + 1] = ar * bi - ai * br;
    }
}

}  // namespace

const Ops& scalar() {
    static const Ops ops = {
        "scalar",
        subtract_scalar,
        axpy_scalar,
        scale_scalar,
        square_scalar,
        sum_scalar,
        sumsq_scalar,
        dot_scalar,
        var_floor_scalar,
        var_floor_min_scalar,
        wiener_gain_scalar,
        deinterleave2_scalar,
        cmul_conj_scalar,
    };
    return ops;
}

}  // namespace prnu::kernels
