#include "spca/cli.hpp"

int main(int argc, char** argv) { return spca::run_cli(argc, argv); }
