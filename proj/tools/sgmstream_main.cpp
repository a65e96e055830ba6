#include "sgmstream/cli.hpp"

int main(int argc, char** argv) { return sgmstream::cli_main(argc, argv); }
