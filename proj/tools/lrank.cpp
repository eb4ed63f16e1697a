#include "labelrank/cli.hpp"

int main(int argc, char** argv) { return labelrank::cli::run(argc, argv); }
