#include <iostream>

#include "eblp/cli.hpp"

int main(int argc, char** argv) {
    return eblp::cli::run(argc, argv, std::cout, std::cerr);
}
