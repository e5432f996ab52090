#include "riemlab/cli.hpp"

int main(int argc, char** argv) { return riemlab::cli::run(argc, argv); }
