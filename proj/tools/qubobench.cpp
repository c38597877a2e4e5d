//
// SPDX-License-Identifier: Apache-2.0
//

#include <iostream>

#include "qubo/cli.hpp"

int main(int argc, char **argv) {
  return qubo::cli::dispatch(argc, argv, std::cout, std::cerr);
}
