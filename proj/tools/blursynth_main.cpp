#include <iostream>

#include "blursynth/dataset/cli.hpp"

int main(int argc, char** argv) {
  return blursynth::dataset::run_cli(argc, argv, std::cout, std::cerr);
}
