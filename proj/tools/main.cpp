#include "pathbench/cli.hpp"

int main(int argc, char** argv) { return pathbench::cli::run(argc, argv); }
