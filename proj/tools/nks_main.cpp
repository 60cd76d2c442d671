#include "nks/cli.hpp"

int main(int argc, char** argv) { return nks::cli::run(argc, argv); }
