#pragma once

// Run configuration, pipeline dispatch and CSV / manifest output.
//
// Configuration documents are "key = value" lines; '#' starts a comment.
// Required keys: Delta, lambda, beta_p, beta_q, L.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "magnon/model.hpp"

namespace magnon {

inline constexpr const char* kVersion = "1.0.0";

enum class Command { Spectrum, Chern, Table1, Butterfly, Edges, Effective, Deform, DSweep };

std::string to_string(Command c);
Command parse_command(const std::string& text);

struct RunConfig {
  ModelParams model;
  Command command = Command::Chern;
  std::optional<int> n_delta;   // chern/deform default 30, dsweep default 60
  int n_eta = 21;
  int max_q = 12;
  int edge_window = 5;
  double threshold = 0.9;
  bool bound_only = true;       // dsweep: bound band only
  bool long_run = false;        // table1: add q = 7, 9
  std::filesystem::path output_dir = ".";

  int chern_grid() const { return n_delta.value_or(30); }
  int sweep_grid() const { return n_delta.value_or(60); }
};

/// Overrides take precedence over the document (command-line flags).
using ConfigOverrides = std::map<std::string, std::string>;

/// Parses, fills defaults and validates against the preconditions of the
/// selected command. Throws ParseError (syntax, unknown or missing keys) or
/// ValidationError naming the offending field.
RunConfig parse_config(const std::string& text, const ConfigOverrides& overrides = {});

/// Canonical key=value listing of every resolved setting.
std::string describe(const RunConfig& config);

/// FNV-1a 64-bit hash, hex encoded.
std::string fnv1a_hex(const std::string& text);

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitValidation = 2,
  kExitConvergence = 3,
  kExitObstruction = 4,
  kExitIo = 5,
};

/// Maps the current exception (call inside a catch block) to an exit code.
int exit_code_for_current_exception();

struct RunReport {
  std::vector<std::filesystem::path> files;
  std::string manifest_hash;
  std::string summary;
};

/// Runs the pipeline and writes its outputs plus manifest.json. On failure
/// any file written by this call is removed and the exception propagates.
RunReport run(const RunConfig& config);

}  // namespace magnon
