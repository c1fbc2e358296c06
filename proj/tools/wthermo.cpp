#include <iostream>

#include "wthermo/cli.hpp"

int main(int argc, char** argv) {
  return wthermo::run_cli(argc, argv, std::cout, std::cerr);
}
