// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "tvdmood/cli.hpp"

#include <cstdio>

namespace tvdmood {

int run_cli(int, const char* const*) {
  std::fprintf(stderr, "not implemented\n");
  return 2;
}

}  // namespace tvdmood
