#pragma once

#include <cstddef>
#include <string>

namespace ptnet::kernels {

// Dense double-precision kernels behind the autodiff engine. Every kernel has
// a scalar reference implementation and an AVX2 variant; the backend is picked
// once at startup from CPUID (overridable via PTNET_KERNELS=scalar|avx2 or
// force_backend). Results of the two backends agree to ~1e-12 relative, not
// bit-exactly: the AVX2 paths use FMA and lane-wise partial sums.

enum class Backend { Scalar, Avx2 };

Backend active_backend();
void force_backend(Backend b);  // throws NumericError if unsupported
bool avx2_supported();
std::string backend_name(Backend b);

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);

void add(const double* a, const double* b, double* out, std::size_t n);
void sub(const double* a, const double* b, double* out, std::size_t n);
void mul(const double* a, const double* b, double* out, std::size_t n);

void relu(const double* x, double* out, std::size_t n);
// dx += g where x > 0
void relu_grad_accum(const double* x, const double* g, double* dx, std::size_t n);

// out = W x, W row-major (rows x cols), x of length cols
void matvec(const double* w, std::size_t rows, std::size_t cols, const double* x,
            double* out);
// xg += W^T g
void matvec_t_accum(const double* w, std::size_t rows, std::size_t cols,
                    const double* g, double* xg);
// Wg += g x^T (outer product of g (rows) and x (cols))
void outer_accum(const double* g, const double* x, double* wg, std::size_t rows,
                 std::size_t cols);

}  // namespace ptnet::kernels
