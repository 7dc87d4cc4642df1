#include <csignal>
#include <iostream>

#include "hedgeff/cli.hpp"

namespace {

extern "C" void on_signal(int) { hedgeff::interrupt_flag().store(true); }

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  return hedgeff::run_cli(argc, argv, std::cout, std::cerr);
}
