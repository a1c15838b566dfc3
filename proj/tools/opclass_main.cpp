#include "opclass/cli.hpp"

int main(int argc, char** argv) { return opclass::cli::run(argc, argv); }
