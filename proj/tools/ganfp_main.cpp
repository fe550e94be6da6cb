#include "ganfp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return ganfp::run_cli(argc, argv, std::cout, std::cerr);
}
