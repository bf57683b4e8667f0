#pragma once

// Vector kernels used by the inner loops (simplex pivots, gradient
// evaluation, directional derivatives). A scalar reference implementation is
// always present; an AVX2/FMA variant is compiled on x86-64 and selected at
// runtime when the CPU supports it. CMGD_SIMD=scalar|avx2 overrides the
// choice.

#include <cstddef>
#include <span>
#include <string_view>

namespace cmgd::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*scale)(double alpha, double* x, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
};

const KernelTable& scalar_table();
/// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_table();

bool isa_supported(Isa isa);
Isa active_isa();
/// Switches the process-wide kernel table. Throws if unsupported.
void set_isa(Isa isa);
std::string_view isa_name(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
double sum(std::span<const double> x);

}  // namespace cmgd::kernels
