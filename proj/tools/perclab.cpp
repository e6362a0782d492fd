#include "perclab/cli.hpp"

int main(int argc, char** argv) { return perclab::cli_dispatch(argc, argv); }
