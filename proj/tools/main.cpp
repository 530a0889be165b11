#include <iostream>
#include <string>
#include <vector>

#include "uavcov/cli.hpp"

int main(int argc, char** argv) {
  return uavcov::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
