#pragma once

// JSON problem format:
//   {"family": "<name>", "n": <int>, "m": <int>, ...family fields...}
// Matrices are nested arrays, row-major. Family fields:
//   generic_quadratic    Q: [m][n][n], b: [m][n] (optional), c: [m] (optional)
//   example31, example32, remark_g   (no fields)
//   example31_perturbed  epsilon: number
//   distance_squared     points: [m][n]
//   phenotypic           A: [m][n][n], points: [m][n]
//   ridge_pair           X: [rows][p], y: [rows], mu: number   (n = p, m = 2)

#include "pareto/problem.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace pareto {

/// Parse failure with the offending field (or line/column for syntax errors).
class ParseError : public ProblemError {
 public:
  ParseError(std::string field, const std::string& what)
      : ProblemError(field.empty() ? what : "field '" + field + "': " + what),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

nlohmann::json problemToJson(const FamilySpec& spec);
std::string serializeProblem(const FamilySpec& spec, int indent = 2);

/// Parses and validates; throws ParseError or ProblemError.
FamilySpec problemFromJson(const nlohmann::json& j);
FamilySpec parseProblem(std::string_view text);
FamilySpec loadProblemFile(const std::filesystem::path& path);

/// Ridge data: header row, numeric rows, last column is the response.
RidgePair readRidgeCsv(std::istream& in, double mu);
RidgePair loadRidgeCsv(const std::filesystem::path& path, double mu);

/// Stable 64-bit FNV-1a digest of the canonical serialization, hex encoded.
std::string problemDigest(const FamilySpec& spec);

}  // namespace pareto
