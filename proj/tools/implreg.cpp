#include "implreg/cli.hpp"

int main(int argc, char** argv) { return implreg::cli_main(argc, argv); }
