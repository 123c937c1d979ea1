#pragma once

#include <cstddef>

namespace ptnet::kernels {

// One entry per kernel; filled by the scalar and AVX2 translation units.
struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t) = nullptr;
  double (*sum)(const double*, std::size_t) = nullptr;
  void (*axpy)(double, const double*, double*, std::size_t) = nullptr;
  void (*scale)(double, double*, std::size_t) = nullptr;
  void (*add)(const double*, const double*, double*, std::size_t) = nullptr;
  void (*sub)(const double*, const double*, double*, std::size_t) = nullptr;
  void (*mul)(const double*, const double*, double*, std::size_t) = nullptr;
  void (*relu)(const double*, double*, std::size_t) = nullptr;
  void (*relu_grad_accum)(const double*, const double*, double*, std::size_t) =
      nullptr;
  void (*matvec)(const double*, std::size_t, std::size_t, const double*,
                 double*) = nullptr;
  void (*matvec_t_accum)(const double*, std::size_t, std::size_t, const double*,
                         double*) = nullptr;
  void (*outer_accum)(const double*, const double*, double*, std::size_t,
                      std::size_t) = nullptr;
};

const KernelTable& scalar_table();
const KernelTable& avx2_table();  // valid only when compiled for x86-64

}  // namespace ptnet::kernels
