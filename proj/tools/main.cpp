#include "cascade_thermo/cli.hpp"

int main(int argc, char** argv) { return cascade_thermo::cli::run(argc, argv); }
