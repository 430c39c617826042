#pragma once
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "swarmdim/errors.hpp"
#include "swarmdim/minimize.hpp"
#include "swarmdim/potentials.hpp"

namespace swarmdim {

// minimal INI: [section] headers, key = value lines, # or ; comments.
// Keeps line numbers so errors can point at the offending line; duplicate
// keys within a section are rejected.
struct IniEntry {
  std::string key;
  std::string value;
  int line = 0;
};
struct IniSection {
  std::string name;
  int line = 0;
  std::vector<IniEntry> entries;
};
struct IniFile {
  std::vector<IniSection> sections;

  const IniSection* find(const std::string& name) const;
};

IniFile parse_ini(const std::string& text);

// "--section.key=value" strings merged over the file (replace or append)
void apply_overrides(IniFile& ini, const std::vector<std::string>& overrides);

// "a:b:step" inclusive range or comma-separated list
std::vector<double> parse_range(const std::string& text, int line = 0);

enum class Command { Minimize, Diagnose, Sweep, PotentialTable };
std::string command_name(Command c);

struct ParticleParams {
  int n = 600;
  int dim = 2;
  double radius = 1.0;
  std::uint64_t seed = 1;
  std::vector<double> masses;  // empty = equal
};

struct OutputParams {
  std::filesystem::path directory;  // resolved against $SWARMDIM_OUTPUT_ROOT if relative
  long long snapshot_interval = 0;
};

struct SweepGrid {
  std::vector<double> gammas;
  std::vector<double> alphas;
  std::vector<std::uint64_t> seeds{1, 2, 3};
};

struct DiagnoseParams {
  std::filesystem::path input;  // particle CSV to diagnose
  long long off_samples = 2000;
  std::uint64_t sample_seed = 1234;
  double tol = 0.0;  // <= 0: auto
};

struct TableParams {
  double r_min = 0.01;
  double r_max = 2.0;
  int points = 200;
  int dim = 2;
};

struct RunConfig {
  Command command = Command::Minimize;
  PotentialSpec potential;
  ParticleParams particles;
  MinimizerSettings solver;
  OutputParams output;
  SweepGrid sweep;
  DiagnoseParams diagnose;
  TableParams table;
  int threads = 1;
};

// typed extraction + cross-field validation for one command; unknown
// sections/keys are ConfigErrors carrying the line number
RunConfig parse_config(const std::string& text, Command command,
                       const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path, Command command,
                      const std::vector<std::string>& overrides = {});

}  // namespace swarmdim
