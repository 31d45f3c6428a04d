#pragma once

#include <iosfwd>

namespace eblp::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,     // I/O and other runtime errors
    kParse = 2,       // unparseable input, model, config or command line
    kDegenerate = 3,  // a coordinate is (almost) never observed
    kNumeric = 4,     // non-finite values or a failed factorization
    kInvalidRank = 5, // rank out of range or dimension mismatch
};

/// Runs the command line `argv` (argv[0] is the program name).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace eblp::cli
