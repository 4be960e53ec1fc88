#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "acceptance_suite.hpp"

// Runs every acceptance criterion and prints one line per criterion.
int main(int argc, char** argv) {
  lognls::acceptance::Options opt;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) opt.only.insert(std::atoi(argv[++i]));
    else if (a == "--corrupt" && i + 1 < argc) opt.corrupt = std::atoi(argv[++i]);
  }
  int failed = 0;
  lognls::acceptance::run(opt, [&](const lognls::acceptance::Result& r) {
    std::printf("%s  criterion %2d  %-50s %6.2f s  %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  });
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
