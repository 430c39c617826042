#pragma once
#include <stdexcept>
#include <string>

namespace swarmdim {

// invalid parameters / broken configuration invariants
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// two particles coincide while the kernel diverges there; carries the pair
struct SingularPairError : std::runtime_error {
  int i, j;
  SingularPairError(int i_, int j_)
      : std::runtime_error("singular pair: particles " + std::to_string(i_) + " and " +
                           std::to_string(j_) + " coincide while w(0+) is infinite"),
        i(i_),
        j(j_) {}
};

// config-file problems; line 0 means "not tied to a specific line" (e.g. a
// command-line override)
struct ConfigError : std::runtime_error {
  int line;
  ConfigError(int line_, const std::string& msg)
      : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
        line(line_) {}
};

}  // namespace swarmdim
