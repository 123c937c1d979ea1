// Reference kernels. Plain loops, no FMA contraction, so these double as the
// ground truth the AVX2 variants are equivalence-tested against.

#include "kernels_impl.hpp"

namespace ptnet::kernels {
namespace {

double dot_s(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_s(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

void axpy_s(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_s(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void add_s(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_s(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_s(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void relu_s(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_grad_accum_s(const double* x, const double* g, double* dx,
                       std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] > 0.0) dx[i] += g[i];
}

void matvec_s(const double* w, std::size_t rows, std::size_t cols,
              const double* x, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_s(w + r * cols, x, cols);
}

void matvec_t_accum_s(const double* w, std::size_t rows, std::size_t cols,
                      const double* g, double* xg) {
  for (std::size_t r = 0; r < rows; ++r) axpy_s(g[r], w + r * cols, xg, cols);
}

void outer_accum_s(const double* g, const double* x, double* wg,
                   std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_s(g[r], x, wg + r * cols, cols);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t = {dot_s,  sum_s,  axpy_s,   scale_s,
                                add_s,  sub_s,  mul_s,    relu_s,
                                relu_grad_accum_s, matvec_s, matvec_t_accum_s,
                                outer_accum_s};
  return t;
}

}  // namespace ptnet::kernels
