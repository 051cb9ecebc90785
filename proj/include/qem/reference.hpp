#pragma once

#include <string>

#include "json.hpp"

namespace qem::harness {

// Published reference values bundled with the toolkit, keyed by table id
// ("table_1", "roots", "aersim_6q", "table_2", "table_3"). The same content
// ships as data/reference_tables.json.
const nlohmann::json& reference_tables();

// Loads a reference-table file, e.g. a locally edited copy.
nlohmann::json load_reference_tables(const std::string& path);

}  // namespace qem::harness
