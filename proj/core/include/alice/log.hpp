#pragma once

#include <string_view>

namespace alice {

/// Writes "warning: <msg>" to stderr unless warnings are silenced.
void warn(std::string_view message);
void set_warnings_enabled(bool enabled);

}  // namespace alice
