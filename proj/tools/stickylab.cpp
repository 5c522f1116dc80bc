#include "stickylab/cli.hpp"

int main(int argc, char** argv) { return stickylab::run_cli(argc, argv); }
