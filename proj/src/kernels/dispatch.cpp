#include <cstdlib>
#include <string>

#include "bincat/errors.hpp"
#include "bincat/kernels.hpp"

namespace bincat::kernels {

namespace {

struct Table {
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  double (*abs_diff_sum)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
};

constexpr Table kScalar{scalar::axpy, scalar::scale, scalar::abs_diff_sum,
                        scalar::sum, scalar::dot};

#if defined(BINCAT_HAVE_AVX2)
constexpr Table kAvx2{avx2::axpy, avx2::scale, avx2::abs_diff_sum, avx2::sum,
                      avx2::dot};
#endif

bool cpu_has_avx2() noexcept {
#if defined(BINCAT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table& table_for(Backend b) {
#if defined(BINCAT_HAVE_AVX2)
  if (b == Backend::avx2) return kAvx2;
#endif
  (void)b;
  return kScalar;
}

Backend initial_backend() {
  Backend best = cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
  if (const char* env = std::getenv("BINCAT_KERNELS")) {
    const std::string want(env);
    if (want == "scalar") return Backend::scalar;
    if (want == "avx2" && best == Backend::avx2) return Backend::avx2;
  }
  return best;
}

struct State {
  Backend backend;
  const Table* table;
  State() : backend(initial_backend()), table(&table_for(backend)) {}
};

State& state() {
  static State s;
  return s;
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

bool supported(Backend b) noexcept {
  return b == Backend::scalar || cpu_has_avx2();
}

Backend active_backend() noexcept { return state().backend; }

void set_backend(Backend b) {
  if (!supported(b)) {
    throw InvalidArgument("kernel backend not available: " +
                          std::string(backend_name(b)));
  }
  state().backend = b;
  state().table = &table_for(b);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  state().table->axpy(a, x.data(), y.data(), x.size());
}

void scale(double a, std::span<double> y) {
  state().table->scale(a, y.data(), y.size());
}

double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  return state().table->abs_diff_sum(a.data(), b.data(), n);
}

double sum(std::span<const double> x) {
  return state().table->sum(x.data(), x.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  return state().table->dot(a.data(), b.data(), n);
}

}  // namespace bincat::kernels
