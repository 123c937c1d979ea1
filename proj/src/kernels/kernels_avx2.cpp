// AVX2/FMA kernels. Compiled with -mavx2 -mfma for this translation unit only;
// never call into here unless avx2_supported() reported true.

#include "kernels_impl.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace ptnet::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_v(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double sum_v(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i];
  return r;
}

void axpy_v(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    yv = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), yv);
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_v(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void add_v(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i,
                     _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_v(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i,
                     _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_v(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i,
                     _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void relu_v(const double* x, double* out, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_max_pd(zero, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_grad_accum_v(const double* x, const double* g, double* dx,
                       std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
    __m256d gv = _mm256_and_pd(mask, _mm256_loadu_pd(g + i));
    _mm256_storeu_pd(dx + i, _mm256_add_pd(_mm256_loadu_pd(dx + i), gv));
  }
  for (; i < n; ++i)
    if (x[i] > 0.0) dx[i] += g[i];
}

void matvec_v(const double* w, std::size_t rows, std::size_t cols,
              const double* x, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_v(w + r * cols, x, cols);
}

void matvec_t_accum_v(const double* w, std::size_t rows, std::size_t cols,
                      const double* g, double* xg) {
  for (std::size_t r = 0; r < rows; ++r) axpy_v(g[r], w + r * cols, xg, cols);
}

void outer_accum_v(const double* g, const double* x, double* wg,
                   std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_v(g[r], x, wg + r * cols, cols);
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable t = {dot_v,  sum_v,  axpy_v,   scale_v,
                                add_v,  sub_v,  mul_v,    relu_v,
                                relu_grad_accum_v, matvec_v, matvec_t_accum_v,
                                outer_accum_v};
  return t;
}

}  // namespace ptnet::kernels

#else  // non-x86 fallback so the TU still links

namespace ptnet::kernels {
const KernelTable& avx2_table() { return scalar_table(); }
}  // namespace ptnet::kernels

#endif
