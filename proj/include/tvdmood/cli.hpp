// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

namespace tvdmood {

// Entry point for the command-line driver.  Returns a process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace tvdmood
