#include <iostream>

#include "sct/cli.hpp"

int main(int argc, char** argv) {
  return sct::cli::run_cli(argc, argv, std::cout, std::cerr);
}
