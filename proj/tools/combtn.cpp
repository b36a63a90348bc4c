#include "combtn/cli.hpp"

int main(int argc, char** argv) { return combtn::cli::run_cli(argc, argv); }
