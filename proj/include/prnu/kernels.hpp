#pragma once

#include <cstddef>

namespace prnu::kernels {

// Data-parallel inner loops shared by the wavelet transform, the Wiener
// shrinkage, fingerprint accumulation, and the correlation normalization.
// Every entry has a scalar reference implementation and, on x86-64 with
// AVX2, a vector variant selected once at startup. The two are
// equivalence-tested against each other; tolerances in those tests allow
// only for reassociation of floating-point reductions.
struct Ops {
    const char* name;

    // out[i] = a[i] - b[i]
    void (*subtract)(double* out, const double* a, const double* b, std::size_t n);
    // y[i] += a * x[i]
    void (*axpy)(double* y, const double* x, double a, std::size_t n);
    // x[i] *= s
    void (*scale)(double* x, double s, std::size_t n);
    // out[i] = x[i] * x[i]
    void (*square)(double* out, const double* x, std::size_t n);

    double (*sum)(const double* x, std::size_t n);
    double (*sumsq)(const double* x, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);

    // v[i] = max(0, m[i] - noise_var)
    void (*var_floor)(double* v, const double* m, double noise_var, std::size_t n);
    // v[i] = min(v[i], max(0, m[i] - noise_var))
    void (*var_floor_min)(double* v, const double* m, double noise_var, std::size_t n);
    // x[i] *= v[i] / (v[i] + noise_var); exact zero when v[i] == 0
    void (*wiener_gain)(double* x, const double* v, double noise_var, std::size_t n);

    // Split interleaved pairs: even[i] = x[2i], odd[i] = x[2i+1]
    void (*deinterleave2)(double* even, double* odd, const double* x,
                          std::size_t npairs);
    // Interleaved complex arrays (re,im): out[i] = conj(a[i]) * b[i]
    void (*cmul_conj)(double* out, const double* a, const double* b,
                      std::size_t ncomplex);
};

enum class Backend { Auto, Scalar, Avx2 };

// Active table. Resolved on first use: AVX2 when the CPU supports it and
// the build carries the variant, otherwise scalar. The environment
// variable PRNU_KERNEL_BACKEND (values: scalar, avx2) forces a backend.
const Ops& active();

const Ops& scalar();

// nullptr when the binary has no AVX2 variant or the CPU lacks it.
const Ops* avx2();

// Force a backend at runtime (tests). Returns false if unavailable.
bool select(Backend b);

}  // namespace prnu::kernels
