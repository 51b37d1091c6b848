#include "polydyn/cli.hpp"

int main(int argc, char** argv) { return polydyn::cli::run(argc, argv); }
