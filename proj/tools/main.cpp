#include "cli/commands.hpp"

int main(int argc, char** argv) { return wlab::cli::cli_main(argc, argv); }
