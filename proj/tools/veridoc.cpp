#include <iostream>
#include <string>
#include <vector>

#include "veridoc/cli.hpp"

int main(int argc, char** argv) {
    return veridoc::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
