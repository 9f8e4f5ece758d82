#pragma once

// JSON debug dumps used by the CLI.

#include <string>

#include "digestweaver/scorer.hpp"
#include "digestweaver/segmenter.hpp"

namespace digestweaver {

/// [[{"i", "j", "heading", "char_len", "text"}, ...], ...]
std::string segment_matrix_json(const SegmentMatrix& omega);

/// [[{"i", "j", "query_density", "profile_density", "score"}, ...], ...]
/// with reals at six decimal places.
std::string scored_matrix_json(const WeightedMatrix& phi);

}  // namespace digestweaver
