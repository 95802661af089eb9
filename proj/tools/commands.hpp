#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace trapgen::cli {

struct RunOptions {
  std::string config_path;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
  bool verify_fft = false;
};

// Each command parses and validates its config, computes everything in
// memory and only then creates out_dir and writes artifacts. Library and
// config errors propagate; main maps them to exit codes.
void cmd_simulate(const RunOptions& opt, std::ostream& log);
void cmd_talbot(const RunOptions& opt, std::ostream& log);
void cmd_sweep(const RunOptions& opt, std::ostream& log);

/// name,value,units rows of the live-computed regression constants.
void cmd_constants(std::ostream& out, int digits);

}  // namespace trapgen::cli
