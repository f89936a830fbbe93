#include "spicelab/cli.hpp"

int main(int argc, char** argv) { return spicelab::cli::run_cli(argc, argv); }
