#pragma once

// Pool file format:
//   { "p": int, "prior_mean": [..p..], "prior_cov": [[..]..] (p x p),
//     "target": [[..]..] (m x p), "experiments": [ {"id": int, "A": [[..]], "R": [[..]]} ] }
// Matrices are row-major arrays of rows; numbers are decimal IEEE-754 doubles.

#include <filesystem>
#include <string>

#include "json.hpp"
#include "optidesign/model.hpp"

namespace optidesign {

using json = nlohmann::json;

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, const std::string& what);
json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j, const std::string& what);

json pool_to_json(const Pool& pool);
/// Throws ParseError for malformed documents; model errors propagate.
Pool pool_from_json(const json& j);

Pool load_pool(const std::filesystem::path& path);
void save_pool(const Pool& pool, const std::filesystem::path& path);

/// [{"id": .., "count": ..}, ...] in id order.
json design_to_json(const Design& d);
Design design_from_json(const json& j);

/// FNV-1a 64-bit hash of the canonical pool JSON, as 16 hex digits.
std::string pool_hash(const Pool& pool);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace optidesign
