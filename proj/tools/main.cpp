#include <iostream>
#include <sstream>

#include "cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  // Buffer stdout so that a failing command prints nothing but its error.
  std::ostringstream out;
  int code = lsr::cli::run(args, out, std::cerr);
  std::cout << out.str() << std::flush;
  return code;
}
