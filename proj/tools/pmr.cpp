#include <iostream>
#include <string>
#include <vector>

#include "pmr/cli.hpp"

int main(int argc, char** argv) {
  return pmr::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
