#include <csignal>
#include <iostream>
#include <string>
#include <vector>

#include "amem/cancel.hpp"
#include "amem/cli.hpp"

namespace {

extern "C" void on_signal(int) { amem::cancel_flag().store(true); }

}  // namespace

int main(int argc, char** argv) {
  amem::cancel_flag().store(false);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::vector<std::string> args(argv, argv + argc);
  return amem::run_cli(args, std::cout, std::cerr);
}
