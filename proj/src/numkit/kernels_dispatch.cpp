#include <cstdlib>
#include <string_view>

#include "autostpp/numkit/kernels.hpp"

namespace autostpp::numkit::kernels {

const KernelTable& active() {
  static const KernelTable& table = [&]() -> const KernelTable& {
    const char* env = std::getenv("AUTOSTPP_SIMD");
    if (env && std::string_view(env) == "scalar") return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return table;
}

}  // namespace autostpp::numkit::kernels
