#pragma once

// Single include point for the vendored nlohmann/json. ordered_json keeps
// object keys in insertion order, which the CLI relies on for byte-stable
// reports.

#include <json.hpp>
