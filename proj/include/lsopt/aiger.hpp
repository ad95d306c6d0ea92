#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "lsopt/aig.hpp"

namespace lsopt {

struct AigerError : AigError {
  using AigError::AigError;
};

/// Parses combinational ASCII ("aag") or binary ("aig") AIGER. Latches are
/// rejected. The result is structurally hashed; a leading comment line, if
/// present, becomes the circuit name.
Aig parse_aiger(std::string_view bytes);

/// ASCII AIGER. Fanins of each and2 are written in canonical (ascending) order.
std::string write_aiger(const Aig& aig);

/// Binary AIGER with delta-encoded and2 section.
std::string write_aiger_binary(const Aig& aig);

Aig read_aiger_file(const std::filesystem::path& path);
void write_aiger_file(const Aig& aig, const std::filesystem::path& path);

}  // namespace lsopt
