#pragma once

#include <string>

#include "ptc/configurations.hpp"
#include "ptc/constants.hpp"
#include "ptc/partition.hpp"

namespace ptc {

inline constexpr const char* format_version = "1.0";

/// Solution JSON. Keys: config, topology, anchors, b_points, lead, angles,
/// unknowns, residual_norm, converged, tolerances, version. Complex numbers
/// are [re, im] pairs; numbers carry 17 significant digits.
std::string solution_to_json(const PTSolution& s, real tol = 0);
/// Re-decodes the map from the stored unknowns. Throws std::invalid_argument
/// on malformed input.
PTSolution solution_from_json(const std::string& text);

std::string bound_report_to_json(const BoundReport& r);
std::string scan_result_to_json(const ScanResult& r);

/// {"pairs": [[[start, length], [start, length]], ...], "marked_pair": k}
NestedPartition partition_from_json(const std::string& text);
std::string partition_to_json(const NestedPartition& p);

std::string read_file(const std::string& path);
/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace ptc
