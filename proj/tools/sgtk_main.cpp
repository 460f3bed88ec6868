#include <string>
#include <vector>

#include "sgtk/cli.hpp"

int main(int argc, char** argv) {
  return sgtk::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
