#pragma once

#include <iostream>

#include "ouhardy/error.hpp"

namespace ouh::cli {

// 0 success, 1 failed check or violated inequality, 2 usage or configuration error.
int exit_code(ErrorKind kind);

// Parses argv, runs one subcommand and writes its CSV reports plus manifest.csv
// into --out. Everything printed goes to out/err and is free of timings and paths.
int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace ouh::cli
