#pragma once

#include <string>
#include <string_view>

#include "ewl/certificate.hpp"
#include "ewl/grid.hpp"
#include "ewl/measure.hpp"
#include "ewl/operator.hpp"
#include "ewl/testing.hpp"

namespace ewl {

// JSON documents list leaves in lexicographic order. Doubles are written in
// shortest round-trip form, so reading a document back is bit exact.
// Parse failures throw ConfigError.

std::string to_json(const GridSpec& spec);
GridSpec grid_from_json(std::string_view text);

std::string to_json(const LeafMeasure& mu);
LeafMeasure measure_from_json(std::string_view text);

std::string to_json(const LeafFunction& f);
LeafFunction function_from_json(std::string_view text);

/// Family tag, grid, both measures, seed, claimed radius, root level, the
/// coefficient table by node id when there is one, and the kernel as a
/// row-major lexicographic matrix (rows on the omega side).
std::string to_json(const DyadicOperator& t);
DyadicOperator operator_from_json(std::string_view text);

/// "x_index,y_index,value" lines over lexicographic leaf indices.
std::string kernel_csv(const DyadicOperator& t);

std::string to_json(const TestingReport& rep);

/// Partitions, bounds with verdicts, constants, per-term values and both
/// stopping families as lists of rectangle addresses.
std::string to_json(const BilinearCertificate& cert, const Grid& grid);

}  // namespace ewl
