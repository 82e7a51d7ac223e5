#include "pbeval/cli.hpp"

int main(int argc, char** argv) { return pbeval::cli_main(argc, argv); }
