#pragma once

// JSON form of trigonometric polynomials, expression trees, cocycles and
// families. Saving then loading reproduces the value exactly (doubles are
// written with round-trip precision). Builder shorthands are accepted on
// input and expanded to trees.

#include <json.hpp>
#include <string>

#include "sl2lab/cocycle.hpp"
#include "sl2lab/family.hpp"

namespace sl2lab {

using Json = nlohmann::json;

inline const double kGoldenMean = 0.5 * (std::sqrt(5.0) - 1.0);
inline const double kSilverMean = std::sqrt(2.0) - 1.0;

/// Frequency from a number, "golden", "silver", or {"partial_quotients": [a1, ...]}
/// (the list is repeated periodically, giving a quadratic irrational).
double parse_frequency(const Json& j);
double periodic_continued_fraction(const std::vector<int>& period);

Json to_json(const TrigPoly& p);
TrigPoly trig_poly_from_json(const Json& j, int dim);

Json to_json(const CocycleExpr& e);
CocycleExpr expr_from_json(const Json& j, int dim);

Json to_json(const Cocycle& c);
Cocycle cocycle_from_json(const Json& j);

Json to_json(const Family& f);
Family family_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace sl2lab
