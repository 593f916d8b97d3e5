#include "rieszlab/cli.hpp"

int main(int argc, char** argv) { return rieszlab::run_cli(argc, argv); }
