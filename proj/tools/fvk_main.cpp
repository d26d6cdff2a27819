#include "fvk/cli.hpp"

int main(int argc, char** argv) { return fvk::run_cli(argc, argv); }
