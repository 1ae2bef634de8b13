#pragma once

#include <string>
#include <vector>

#include "driftgmm/types.hpp"

namespace driftgmm {

struct LoadedStream {
    std::vector<Observation> observations;
    long rejected_rows = 0;  // non-numeric or ragged rows
};

/// Loads a stream from CSV: every column but the last is a numeric
/// attribute, the last is the class label. A leading header row is
/// skipped. Rows that fail to parse are rejected and counted.
LoadedStream load_stream_csv(const std::string& path);

}  // namespace driftgmm
