#include "sigver/cli.hpp"

int main(int argc, char** argv) { return sigver::run_cli(argc, argv); }
