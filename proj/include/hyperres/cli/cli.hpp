#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace hyperres
{
    enum ExitCode : int
    {
        ExitSuccess = 0,
        ExitUnsatisfiable = 1,  // also an invalid solution or an unplannable cycle
        ExitUsage = 2,          // usage errors and malformed input
    };

    /// Runs one command line (without the program name); `in` backs `-` paths.
    int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);
}
