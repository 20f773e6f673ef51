#include <iostream>

#include "gamecheck/cli.hpp"

int main(int argc, char** argv) {
  return gamecheck::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
