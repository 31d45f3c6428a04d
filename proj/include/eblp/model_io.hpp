#pragma once

#include <filesystem>
#include <iosfwd>

#include "eblp/pipeline.hpp"

namespace eblp {

/// JSON serialization of a fitted model. Doubles round-trip exactly.
void save_model(std::ostream& out, const EblpModel& model);
void save_model_file(const std::filesystem::path& path, const EblpModel& model);

/// Throws ParseError on malformed or inconsistent content.
EblpModel load_model(std::istream& in);
EblpModel load_model_file(const std::filesystem::path& path);

}  // namespace eblp
