#include "prnu/kernels.hpp"

// AVX2 + FMA variants. This translation unit is built with -mavx2 -mfma;
// the dispatcher only installs the table after a runtime CPU check, so
// nothing here executes on machines without AVX2.

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <algorithm>

namespace prnu::kernels {
namespace {

void subtract_avx2(double* out, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i),
                                                _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void axpy_avx2(double* y, const double* x, double a, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yv = _mm256_loadu_pd(y + i);
        yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
        _mm256_storeu_pd(y + i, yv);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(double* x, double s, std::size_t n) {
    const __m256d sv = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), sv));
    }
    for (; i < n; ++i) x[i] *= s;
}

void square_avx2(double* out, const double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(v, v));
    }
    for (; i < n; ++i) out[i] = x[i] * x[i];
}

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double total = hsum(acc);
    for (; i < n; ++i) total += x[i];
    return total;
}

double sumsq_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double total = hsum(acc);
    for (; i < n; ++i) total += x[i] * x[i];
    return total;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    }
    double total = hsum(acc);
    for (; i < n; ++i) total += a[i] * b[i];
    return total;
}

void var_floor_avx2(double* v, const double* m, double noise_var, std::size_t n) {
    const __m256d nv = _mm256_set1_pd(noise_var);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(m + i), nv);
        _mm256_storeu_pd(v + i, _mm256_max_pd(zero, d));
    }
    for (; i < n; ++i) v[i] = std::max(0.0, m[i] - noise_var);
}

void var_floor_min_avx2(double* v, const double* m, double noise_var, std::size_t n) {
    const __m256d nv = _mm256_set1_pd(noise_var);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_max_pd(zero, _mm256_sub_pd(_mm256_loadu_pd(m + i), nv));
        _mm256_storeu_pd(v + i, _mm256_min_pd(_mm256_loadu_pd(v + i), d));
    }
    for (; i < n; ++i) v[i] = std::min(v[i], std::max(0.0, m[i] - noise_var));
}

void wiener_gain_avx2(double* x, const double* v, double noise_var, std::size_t n) {
    const __m256d nv = _mm256_set1_pd(noise_var);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vv = _mm256_loadu_pd(v + i);
        const __m256d gain = _mm256_div_pd(vv, _mm256_add_pd(vv, nv));
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), gain));
    }
    for (; i < n; ++i) x[i] *= v[i] / (v[i] + noise_var);
}

void deinterleave2_avx2(double* even, double* odd, const double* x,
                        std::size_t npairs) {
    std::size_t i = 0;
    for (; i + 4 <= npairs; i += 4) {
        const __m256d v0 = _mm256_loadu_pd(x + 2 * i);      // x0 x1 x2 x3
        const __m256d v1 = _mm256_loadu_pd(x + 2 * i + 4);  // x4 x5 x6 x7
        __m256d ev = _mm256_unpacklo_pd(v0, v1);            // x0 x4 x2 x6
        __m256d od = _mm256_unpackhi_pd(v0, v1);            // x1 x5 x3 x7
        ev = _mm256_permute4x64_pd(ev, 0xD8);               // x0 x2 x4 x6
        od = _mm256_permute4x64_pd(od, 0xD8);               // x1 x3 x5 x7
        _mm256_storeu_pd(even + i, ev);
        _mm256_storeu_pd(odd + i, od);
    }
    for (; i < npairs; ++i) {
        even[i] = x[2 * i];
        odd[i] = x[2 * i + 1];
    }
}

void cmul_conj_avx2(double* out, const double* a, const double* b,
                    std::size_t ncomplex) {
    std::size_t i = 0;
    for (; i + 2 <= ncomplex; i += 2) {
        const __m256d av = _mm256_loadu_pd(a + 2 * i);  // ar0 ai0 ar1 ai1
        const __m256d bv = _mm256_loadu_pd(b + 2 * i);
        const __m256d ar = _mm256_movedup_pd(av);          // ar0 ar0 ar1 ar1
        const __m256d ai = _mm256_permute_pd(av, 0xF);     // ai0 ai0 ai1 ai1
        const __m256d bsw = _mm256_permute_pd(bv, 0x5);    // bi0 br0 bi1 br1
        // even: ar*br + ai*bi, odd: ar*bi - ai*br
        const __m256d t = _mm256_mul_pd(ai, bsw);
        _mm256_storeu_pd(out + 2 * i, _mm256_fmsubadd_pd(ar, bv, t));
    }
    for (; i < ncomplex; ++i) {
        const double ar = a[2 * i], ai = a[2 * i + 1];
        const double br = b[2 * i], bi = b[2 * i + 1];
        out[2 * i] = ar * br + ai * bi;
        out[2 * i + 1] = ar * bi - ai * br;
    }
}

}  // namespace

const Ops* avx2_table() {
    static const Ops ops = {
        "avx2",
        subtract_avx2,
        axpy_avx2,
        scale_avx2,
        square_avx2,
        sum_avx2,
        sumsq_avx2,
        dot_avx2,
        var_floor_avx2,
        var_floor_min_avx2,
        wiener_gain_avx2,
        deinterleave2_avx2,
        cmul_conj_avx2,
    };
    return &ops;
}

}  // namespace prnu::kernels

#else

namespace prnu::kernels {
const Ops* avx2_table() { return nullptr; }
}  // namespace prnu::kernels

#endif
