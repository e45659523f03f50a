#pragma once

#include <string>

#include "vendor_json.hpp"

namespace bikegeo {

// Floats in exported tables carry 17 significant digits so that identical runs
// produce byte-identical files.
std::string format_double(double v);

// Write-then-rename: the target never holds a partial file.
void atomic_write(const std::string& path, const std::string& content);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

}  // namespace bikegeo
