#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace uavnav::cli {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;      // bad flags, config, checkpoint or index
inline constexpr int kNumerical = 3;  // NaN/Inf abort during training
}  // namespace exit_code

inline constexpr const char* kOutputRootEnv = "UAVNAV_OUTPUT_ROOT";

// Default output directory for a subcommand: $UAVNAV_OUTPUT_ROOT/<name>, or
// runs/<name> when the variable is unset.
std::filesystem::path default_output_dir(const std::string& subcommand);

// Entry point shared by the executable and the tests. args[0] is the
// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uavnav::cli
