#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kernels_impl.hpp"

namespace spca::kernels {

namespace {

constexpr KernelTable kScalar{
    "scalar",
    &scalar::dot,
    &scalar::axpy,
    &scalar::scale,
    &scalar::row_combination,
    &scalar::gather_dot_rows,
    &scalar::syrk_upper,
};

#if defined(SPCA_HAVE_AVX2)
constexpr KernelTable kAvx2{
    "avx2",
    &avx2::dot,
    &avx2::axpy,
    &avx2::scale,
    &avx2::row_combination,
    &avx2::gather_dot_rows,
    &avx2::syrk_upper,
};

bool cpu_has_avx2() noexcept {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable* initial_table() noexcept {
  const KernelTable* best = avx2_table();
  if (const char* env = std::getenv("SPCA_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return &kScalar;
  }
  return best ? best : &kScalar;
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* avx2_table() noexcept {
#if defined(SPCA_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_relaxed); }

bool select_backend(Backend backend) noexcept {
  const KernelTable* t = backend == Backend::scalar ? &kScalar : avx2_table();
  if (t == nullptr) return false;
  current().store(t, std::memory_order_relaxed);
  return true;
}

std::string_view active_name() noexcept { return active().name; }

}  // namespace spca::kernels
