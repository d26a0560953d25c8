#include "cli.hpp"

int main(int argc, char** argv) { return advsmo::cli::run_command(argc, argv); }
