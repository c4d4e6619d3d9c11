#ifndef ANCHORREFINE_CLI_COMMANDS_H_
#define ANCHORREFINE_CLI_COMMANDS_H_

// Subcommands of the anchorrefine tool.
//
//   gen-data   expert demonstrations -> dataset.jsonl
//   train      --phase 1|2 [--variant NAME] [--anchor CKPT]
//   eval       --anchor CKPT [--refine CKPT] [--force]
//   analyze    --kind residuals|transitions|grip-profile|loss-dynamics
//   ablate     [--variants CSV] [--seeds N]
//
// Exit codes: 0 success, 2 usage or validation error, 3 numerical failure,
// 1 anything unexpected.

#include <iosfwd>
#include <string>
#include <vector>

namespace anchorrefine::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

// args[0] is the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace anchorrefine::cli

#endif  // ANCHORREFINE_CLI_COMMANDS_H_
