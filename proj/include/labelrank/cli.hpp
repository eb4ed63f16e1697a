// Command-line front end: data generation, featurization, training,
// prediction, evaluation, and cross-validated benchmarking. Every command
// writes a JSON run manifest next to its primary output recording the full
// configuration, seed, paths, and wall-clock timings.
#pragma once

#include <string>
#include <vector>

namespace labelrank::cli {

// Returns the process exit code: 0 on success, nonzero after printing a
// one-line diagnostic to stderr.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace labelrank::cli
