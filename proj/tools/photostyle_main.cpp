#include "photostyle/cli.hpp"

int main(int argc, char** argv) { return photostyle::cli_main(argc, argv); }
