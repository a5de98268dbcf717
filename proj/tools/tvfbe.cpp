#include "tvfbe/cli.hpp"

int main(int argc, char** argv) { return tvfbe::cli::run_cli(argc, argv); }
