#include "commands.hpp"

int main(int argc, char** argv) {
  return lognls::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
