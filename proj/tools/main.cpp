#include "wdro/cli.hpp"

int main(int argc, char** argv) { return wdro::cli::run(argc, argv); }
