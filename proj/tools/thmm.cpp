#include "thmm/cli.hpp"

int main(int argc, char** argv) { return thmm::cli::run(argc, argv, std::cout, std::cerr); }
