#include <string>
#include <vector>

#include "twem/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return twem::run_cli(args);
}
