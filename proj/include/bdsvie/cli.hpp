#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bdsvie::cli {

/// Entry point behind main(); also callable in-process from tests.
/// Subcommands: solve, verify, certificate, oracles. Output files and
/// stdout are byte-deterministic for a fixed config and seed; wall-clock
/// chatter goes to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace bdsvie::cli
