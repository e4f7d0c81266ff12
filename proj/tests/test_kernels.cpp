#include <doctest.h>

#include <prnu/kernels.hpp>

#include "test_util.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

using prnu::kernels::Backend;
using prnu::kernels::Ops;

namespace {

// Independent reference loops, written against the documented contract of
// each entry rather than by calling into the library.
namespace ref {

std::vector<double> subtract(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] - b[i];
    return out;
}

std::vector<double> axpy(std::vector<double> y, const std::vector<double>& x, double a) {
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] += a * x[i];
    return y;
}

std::vector<double> scale(std::vector<double> x, double s) {
    for (auto& v : x)
        v *= s;
    return x;
}

std::vector<double> square(const std::vector<double>& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = x[i] * x[i];
    return out;
}

double sum(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x)
        s += v;
    return s;
}

double sumsq(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x)
        s += v * v;
    return s;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

std::vector<double> var_floor(const std::vector<double>& m, double noise_var) {
    std::vector<double> v(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        v[i] = std::max(0.0, m[i] - noise_var);
    return v;
}

std::vector<double> var_floor_min(std::vector<double> v, const std::vector<double>& m,
                                  double noise_var) {
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = std::min(v[i], std::max(0.0, m[i] - noise_var));
    return v;
}

std::vector<double> wiener_gain(std::vector<double> x, const std::vector<double>& v,
                                double noise_var) {
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = (v[i] == 0.0) ? 0.0 : x[i] * (v[i] / (v[i] + noise_var));
    return x;
}

}  // namespace ref

std::vector<double> random_vec(std::size_t n, std::uint64_t seed, double lo = -10.0,
                               double hi = 10.0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v)
        x = dist(gen);
    return v;
}

const std::vector<std::size_t> kSizes = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 32, 33, 100, 255, 1024};

// Exercises one Ops table against the in-test reference loops.  `tol` is a
// relative tolerance for reductions and fused elementwise arithmetic; the
// scalar table is expected to match the references exactly.
void check_table(const Ops& ops, double elementwise_tol, double reduce_tol) {
    for (std::size_t n : kSizes) {
        auto a = random_vec(n, 11 + n);
        auto b = random_vec(n, 23 + n);
        auto pos = random_vec(n, 37 + n, 0.0, 25.0);

        {
            std::vector<double> out(n, -99.0);
            ops.subtract(out.data(), a.data(), b.data(), n);
            auto expect = ref::subtract(a, b);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(out[i] == expect[i]);
        }
        {
            auto y = b;
            ops.axpy(y.data(), a.data(), 1.75, n);
            auto expect = ref::axpy(b, a, 1.75);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(y[i] == doctest::Approx(expect[i]).epsilon(elementwise_tol));
        }
        {
            auto x = a;
            ops.scale(x.data(), -0.375, n);
            auto expect = ref::scale(a, -0.375);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(x[i] == expect[i]);
        }
        {
            std::vector<double> out(n, -99.0);
            ops.square(out.data(), a.data(), n);
            auto expect = ref::square(a);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(out[i] == expect[i]);
        }
        {
            double got = ops.sum(a.data(), n);
            CHECK(got == doctest::Approx(ref::sum(a)).epsilon(reduce_tol));
            got = ops.sumsq(a.data(), n);
            CHECK(got == doctest::Approx(ref::sumsq(a)).epsilon(reduce_tol));
            got = ops.dot(a.data(), b.data(), n);
            CHECK(got == doctest::Approx(ref::dot(a, b)).epsilon(reduce_tol));
        }
        {
            std::vector<double> v(n, -99.0);
            ops.var_floor(v.data(), pos.data(), 9.0, n);
            auto expect = ref::var_floor(pos, 9.0);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(v[i] == expect[i]);
        }
        {
            auto v = random_vec(n, 53 + n, 0.0, 30.0);
            auto m = random_vec(n, 67 + n, 0.0, 30.0);
            auto got = v;
            ops.var_floor_min(got.data(), m.data(), 9.0, n);
            auto expect = ref::var_floor_min(v, m, 9.0);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(got[i] == expect[i]);
        }
        {
            auto v = ref::var_floor(pos, 9.0);  // includes exact zeros
            auto x = a;
            ops.wiener_gain(x.data(), v.data(), 9.0, n);
            auto expect = ref::wiener_gain(a, v, 9.0);
            for (std::size_t i = 0; i < n; ++i) {
                if (v[i] == 0.0)
                    CHECK(x[i] == 0.0);  // exact zero required by the contract
                else
                    CHECK(x[i] == doctest::Approx(expect[i]).epsilon(elementwise_tol));
            }
        }
        {
            auto x = random_vec(2 * n, 71 + n);
            std::vector<double> even(n, -99.0), odd(n, -99.0);
            ops.deinterleave2(even.data(), odd.data(), x.data(), n);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(even[i] == x[2 * i]);
                CHECK(odd[i] == x[2 * i + 1]);
            }
        }
        {
            auto ar = random_vec(2 * n, 81 + n);
            auto br = random_vec(2 * n, 91 + n);
            std::vector<double> out(2 * n, -99.0);
            ops.cmul_conj(out.data(), ar.data(), br.data(), n);
            for (std::size_t i = 0; i < n; ++i) {
                std::complex<double> ca(ar[2 * i], ar[2 * i + 1]);
                std::complex<double> cb(br[2 * i], br[2 * i + 1]);
                std::complex<double> expect = std::conj(ca) * cb;
                CHECK(out[2 * i] == doctest::Approx(expect.real()).epsilon(elementwise_tol));
                CHECK(out[2 * i + 1] == doctest::Approx(expect.imag()).epsilon(elementwise_tol));
            }
        }
    }
}

}  // namespace

TEST_CASE("scalar kernel table matches reference loops") {
    // The scalar implementations use the same operation order as the
    // references, so elementwise results must be bit-identical and
    // reductions agree to a tight tolerance.
    check_table(prnu::kernels::scalar(), 1e-14, 1e-12);
}

TEST_CASE("avx2 kernel table matches scalar within reduction tolerance") {
    const Ops* v = prnu::kernels::avx2();
    if (v == nullptr) {
        MESSAGE("AVX2 backend unavailable on this machine; skipping equivalence test");
        return;
    }
    // FMA contraction and 4-lane reduction reassociation are the only
    // allowed sources of divergence.
    check_table(*v, 1e-12, 1e-10);

    // Direct scalar-vs-vector comparison on a large buffer.
    const auto& s = prnu::kernels::scalar();
    auto a = random_vec(4096, 1234);
    auto b = random_vec(4096, 4321);
    CHECK(v->dot(a.data(), b.data(), a.size()) ==
          doctest::Approx(s.dot(a.data(), b.data(), a.size())).epsilon(1e-12));
    CHECK(v->sumsq(a.data(), a.size()) ==
          doctest::Approx(s.sumsq(a.data(), a.size())).epsilon(1e-12));
}

TEST_CASE("backend selection") {
    CHECK(prnu::kernels::select(Backend::Scalar));
    CHECK(std::string(prnu::kernels::active().name) == "scalar");

    const bool has_avx2 = prnu::kernels::avx2() != nullptr;
    CHECK(prnu::kernels::select(Backend::Avx2) == has_avx2);
    if (has_avx2)
        CHECK(std::string(prnu::kernels::active().name) == "avx2");

    // Restore automatic resolution for the remaining tests.
    CHECK(prnu::kernels::select(Backend::Auto));
    CHECK((std::string(prnu::kernels::active().name) == "scalar" ||
           std::string(prnu::kernels::active().name) == "avx2"));
}
