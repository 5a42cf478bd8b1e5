#include "qkdmem/cli.hpp"

int main(int argc, char** argv) { return qkdmem::run_cli(argc, argv); }
