#include "sparse_recover/cli.hpp"

int main(int argc, char** argv) { return sparse_recover::cli::run_cli(argc, argv); }
