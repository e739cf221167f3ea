#pragma once

#include <string>
#include <vector>

namespace botdetect {

/// Dispatches the subcommands (build-chartable, train, compare-learners,
/// predict, evaluate, importance, synth, inspect-model). Exit codes:
/// 0 success, 1 usage error, 2 data error, 3 internal error. Non-zero exits
/// print one machine-parseable line to the error stream.
int run(const std::vector<std::string>& args);

}  // namespace botdetect
