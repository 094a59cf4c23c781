#include "flowcast/cli.hpp"

int main(int argc, char** argv) { return flowcast::cli_main(argc, argv); }
