#include "kfdar/cli.hpp"

int main(int argc, char** argv) { return kfdar::cli::cli_main(argc, argv); }
