#pragma once

#include <ostream>

namespace blursynth::dataset {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitPartial = 2 };

// Entry point of the `blursynth` tool:
//   synthesize --config FILE [--seed N] [--baseline-rgb] [--factor K]
//              [--out DIR] [--workers N]
//   evaluate   --pred DIR --gt DIR [--partitions p1,p2,...] [--csv FILE]
//   inspect    --manifest FILE
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace blursynth::dataset
