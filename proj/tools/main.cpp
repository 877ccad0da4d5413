#include "periodbench/cli.hpp"

int main(int argc, char** argv) { return periodbench::cli::main(argc, argv); }
