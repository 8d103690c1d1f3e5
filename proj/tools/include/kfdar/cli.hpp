#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kfdar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitUsage = 2;

// Header row of every CSV written by `bench`.
inline constexpr const char* kCsvHeader =
    "instance,problem,algo,n,m,capacity,k,seed,length,flow_lb,steiner_lb,oracle,ratio_lb,"
    "ratio_oracle,wall_ms";

// Runs one command line (without the program name). Regular output goes to
// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace kfdar::cli
