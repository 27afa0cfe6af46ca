#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mrm/machine.hpp"

namespace mrm {

// Machine-program text format, one machine per file:
//
//   alphabet: _ 0 1
//   blank: _
//   start: q0
//   halt: qh
//   q0 1 -> q0 1 R
//
// '#' starts a comment. Symbols are single characters. Parse failures throw
// Error(ParseError) whose message names the offending line.
MachineSpec parse_program(std::string_view text, std::string name);
MachineSpec load_program(const std::filesystem::path& path);

}  // namespace mrm
