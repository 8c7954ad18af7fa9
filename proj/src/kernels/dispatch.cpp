// Copyright 2026 The relaxopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <cstdlib>
#include <string>

#include "relaxopt/kernels.hpp"

namespace relaxopt::kernels {

#ifdef RELAXOPT_HAVE_AVX2
namespace detail {
const KernelTable* avx2_table_unchecked();
}
#endif

const KernelTable* avx2_table() {
#ifdef RELAXOPT_HAVE_AVX2
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? detail::avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* lookup(std::string_view name) {
  if (name == "scalar") return &scalar_table();
  if (name == "avx2") return avx2_table();
  if (name == "auto" || name.empty()) {
    const KernelTable* best = avx2_table();
    return best ? best : &scalar_table();
  }
  return nullptr;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table = [] {
    const char* env = std::getenv("RELAXOPT_KERNELS");
    const KernelTable* t = lookup(env ? std::string_view(env) : "auto");
    return t ? t : lookup("auto");
  }();
  return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(std::string_view name) {
  const KernelTable* t = lookup(name);
  if (!t) return false;
  current().store(t, std::memory_order_release);
  return true;
}

}  // namespace relaxopt::kernels
