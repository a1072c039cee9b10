#pragma once

// Data-parallel inner loops of the pmf engine. Every routine has a portable
// scalar implementation and, on x86-64, an AVX2/FMA implementation; the
// variant is chosen once at startup from CPUID and can be forced with the
// BINCAT_KERNELS environment variable ("scalar" or "avx2").

#include <span>
#include <string_view>

namespace bincat::kernels {

enum class Backend { scalar, avx2 };

std::string_view backend_name(Backend b) noexcept;

/// True when the backend was compiled in and the CPU supports it.
bool supported(Backend b) noexcept;

Backend active_backend() noexcept;

/// Switches the process-wide backend. Throws InvalidArgument if unsupported.
/// Not synchronised; call before starting worker threads.
void set_backend(Backend b);

/// y[i] += a * x[i] for i < x.size(). Requires y.size() >= x.size().
void axpy(double a, std::span<const double> x, std::span<double> y);

/// y[i] *= a.
void scale(double a, std::span<double> y);

/// sum_i |a[i] - b[i]| over the common length.
double abs_diff_sum(std::span<const double> a, std::span<const double> b);

/// sum_i x[i].
double sum(std::span<const double> x);

/// sum_i a[i] * b[i] over the common length.
double dot(std::span<const double> a, std::span<const double> b);

// Per-backend entry points, exposed for the equivalence tests.
namespace scalar {
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double a, double* y, std::size_t n);
double abs_diff_sum(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double a, double* y, std::size_t n);
double abs_diff_sum(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace avx2

}  // namespace bincat::kernels
