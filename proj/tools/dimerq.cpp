#include <dimerq/cli.hpp>

#include <iostream>

int main(int argc, char** argv) {
  return dimerq::cli::run(argc, argv, std::cout, std::cerr);
}
