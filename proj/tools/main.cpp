// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "tvdmood/cli.hpp"

int main(int argc, char** argv) { return tvdmood::run_cli(argc, argv); }
