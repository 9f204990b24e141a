#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "spaceopt/gp.hpp"
#include "spaceopt/search_space.hpp"
#include "spaceopt/spacegen.hpp"

namespace spaceopt {

inline constexpr const char* kToolName = "spaceopt";
inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

/// Search-space document:
/// {"dims": [{"name": str, "scale": "linear"|"log10", "min": num, "max": num,
///            "grid": [num...]?}], "comment"?: str, "provenance"?: {...}}
/// Grid values outside [min, max] are dropped at load (with a stderr note),
/// mirroring how generated subspaces inherit filtered grids.
SearchSpace space_from_json(const Json& j);
Json space_to_json(const SearchSpace& space);
Json space_to_json(const RatedSpace& generated);

SearchSpace load_space_file(const std::filesystem::path& path);
void save_space_file(const std::filesystem::path& path, const Json& doc);

/// Observation CSV: a header row with one column per dimension name plus an
/// "objective" column, in any order; every cell a finite real. negate flips
/// the objective sign (for maximize-style logs). Parse errors carry
/// file:line:column positions; exit-code-2 material.
Dataset load_observations_csv(const std::filesystem::path& path,
                              const SearchSpace& space, bool negate = false);

/// Debug dump of a fitted model (positive-scale kernel parameters,
/// standardization constants, training data). Not a stability-guaranteed
/// format.
Json model_to_json(const GpModel& model);

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters.
std::string file_digest_hex(const std::filesystem::path& path);

/// Reproducibility manifest attached to every command's output.
Json make_manifest(std::uint64_t seed,
                   const std::vector<std::filesystem::path>& inputs,
                   Json config = Json::object());

/// Trailing comment line for CSV outputs.
std::string csv_manifest_line(std::uint64_t seed);

/// Shortest round-trip-safe decimal formatting helpers used by all writers,
/// so identical runs emit identical bytes.
std::string format_double(double v);

}  // namespace spaceopt
