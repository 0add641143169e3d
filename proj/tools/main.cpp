#include "linimpute/cli.hpp"

int main(int argc, char** argv) { return linimpute::cli_dispatch(argc, argv); }
