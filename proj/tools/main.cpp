#include "entroprod/cli.hpp"

int main(int argc, char** argv) { return entroprod::cli::run_cli(argc, argv); }
