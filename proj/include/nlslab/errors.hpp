#pragma once

#include <stdexcept>
#include <string>

namespace nlslab {

// Invalid parameters, sizes, or preconditions detectable from configuration.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// NaN/Inf data, solver blow-up, or a non-convergent iteration.
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed snapshot or report files.
struct format_error : std::runtime_error {
  explicit format_error(const std::string& what) : std::runtime_error(what) {}
};

// A guarded "cannot happen" condition.
struct internal_error : std::logic_error {
  explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace nlslab
