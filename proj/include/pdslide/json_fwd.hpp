#pragma once

// Single include point for the vendored nlohmann/json.
#include <json.hpp>
