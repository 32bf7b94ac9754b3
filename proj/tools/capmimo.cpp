#include "capmimo/cli.hpp"

int main(int argc, char** argv) { return capmimo::cli_main(argc, argv); }
