#include "ouhardy/cli.hpp"

int main(int argc, char** argv) { return ouh::cli::run(argc, argv); }
