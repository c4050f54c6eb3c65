// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/simd/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace autohls::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(AUTOHLS_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::runtime_error("ISA not supported on this host: " + std::string(isa_name(isa)));
  }
#if defined(AUTOHLS_HAVE_AVX2_TU)
  if (isa == Isa::Avx2) return detail::avx2_kernels();
#endif
  return scalar_kernels();
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("AUTOHLS_ISA")) {
    const std::string_view want(env);
    if (want == "scalar") return scalar_kernels();
    if (want == "avx2" && isa_supported(Isa::Avx2)) return kernels_for(Isa::Avx2);
  }
  if (isa_supported(Isa::Avx2)) return kernels_for(Isa::Avx2);
  return scalar_kernels();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace autohls::simd
