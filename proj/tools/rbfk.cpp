#include "rbfk/cli.hpp"

int main(int argc, char** argv) { return rbfk::cli_main(argc, argv); }
