#include "tsal/cli.hpp"

int main(int argc, char** argv) { return tsal::cli::run(argc, argv); }
