#include "pqw/cli_harness.hpp"

int main(int argc, char** argv) { return pqw::cli::run(argc, argv); }
