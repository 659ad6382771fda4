#include <atomic>
#include <cstdlib>
#include <string>

#include "ecomplex/error.hpp"
#include "ecomplex/kernels.hpp"

namespace ecomplex::kernels {
namespace {

Isa best_available() noexcept {
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa initial_isa() noexcept {
  if (const char* env = std::getenv("ECOMPLEX_SIMD")) {
    const std::string_view v(env);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon})
      if (v == isa_name(isa) && isa_available(isa)) return isa;
  }
  return best_available();
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

void check_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw Error(Errc::InvalidArgument, "kernel operands differ in length");
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_available(isa))
    throw Error(Errc::InvalidArgument, "SIMD variant '" + std::string(isa_name(isa)) + "' is not available");
  current().store(isa, std::memory_order_relaxed);
}

const Table& table(Isa isa) {
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2: return avx2::kTable;
#endif
#if defined(__aarch64__)
    case Isa::Neon: return neon::kTable;
#endif
    default: return scalar::kTable;
  }
}

double sum(std::span<const double> x) { return table(active_isa()).sum(x.data(), x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
  check_same_size(x.size(), y.size());
  return table(active_isa()).dot(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  check_same_size(x.size(), y.size());
  table(active_isa()).axpy(a, x.data(), y.data(), x.size());
}

void scale(std::span<double> x, double a) { table(active_isa()).scale(x.data(), a, x.size()); }

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  check_same_size(x.size(), y.size());
  return table(active_isa()).max_abs_diff(x.data(), y.data(), x.size());
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y) {
  check_same_size(a.size(), rows * cols);
  check_same_size(x.size(), cols);
  check_same_size(y.size(), rows);
  table(active_isa()).gemv(a.data(), rows, cols, x.data(), y.data());
}

}  // namespace ecomplex::kernels
