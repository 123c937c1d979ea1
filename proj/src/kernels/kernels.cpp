#include "ptnet/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "kernels_impl.hpp"
#include "ptnet/types.hpp"

namespace ptnet::kernels {
namespace {

struct Dispatch {
  Backend backend;
  const KernelTable* table;
};

bool detect_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Dispatch initial_dispatch() {
  Backend b = detect_avx2() ? Backend::Avx2 : Backend::Scalar;
  if (const char* env = std::getenv("PTNET_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) b = Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0 && detect_avx2()) b = Backend::Avx2;
  }
  return {b, b == Backend::Avx2 ? &avx2_table() : &scalar_table()};
}

Dispatch& dispatch() {
  static Dispatch d = initial_dispatch();
  return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

bool avx2_supported() { return detect_avx2(); }

std::string backend_name(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

void force_backend(Backend b) {
  if (b == Backend::Avx2 && !detect_avx2())
    throw NumericError("avx2 kernels not supported on this cpu");
  dispatch().backend = b;
  dispatch().table = (b == Backend::Avx2) ? &avx2_table() : &scalar_table();
}

double dot(const double* a, const double* b, std::size_t n) {
  return dispatch().table->dot(a, b, n);
}
double sum(const double* x, std::size_t n) { return dispatch().table->sum(x, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  dispatch().table->axpy(alpha, x, y, n);
}
void scale(double alpha, double* x, std::size_t n) {
  dispatch().table->scale(alpha, x, n);
}
void add(const double* a, const double* b, double* out, std::size_t n) {
  dispatch().table->add(a, b, out, n);
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  dispatch().table->sub(a, b, out, n);
}
void mul(const double* a, const double* b, double* out, std::size_t n) {
  dispatch().table->mul(a, b, out, n);
}
void relu(const double* x, double* out, std::size_t n) {
  dispatch().table->relu(x, out, n);
}
void relu_grad_accum(const double* x, const double* g, double* dx,
                     std::size_t n) {
  dispatch().table->relu_grad_accum(x, g, dx, n);
}
void matvec(const double* w, std::size_t rows, std::size_t cols, const double* x,
            double* out) {
  dispatch().table->matvec(w, rows, cols, x, out);
}
void matvec_t_accum(const double* w, std::size_t rows, std::size_t cols,
                    const double* g, double* xg) {
  dispatch().table->matvec_t_accum(w, rows, cols, g, xg);
}
void outer_accum(const double* g, const double* x, double* wg, std::size_t rows,
                 std::size_t cols) {
  dispatch().table->outer_accum(g, x, wg, rows, cols);
}

}  // namespace ptnet::kernels
