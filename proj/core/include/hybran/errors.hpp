#pragma once

#include <stdexcept>
#include <string>

namespace hybran {

// Validation and domain errors use std::invalid_argument directly.
// The types below mark conditions callers are expected to branch on.

/// A cell dataset had no training pairs; the caller decides the fallback.
struct EmptyDatasetError : std::runtime_error {
    explicit EmptyDatasetError(const std::string& what) : std::runtime_error(what) {}
};

/// Training loss became non-finite.
struct TrainingDivergedError : std::runtime_error {
    explicit TrainingDivergedError(const std::string& what) : std::runtime_error(what) {}
};

/// Exact-union reachability exceeded the fragment cap.
struct FragmentOverflowError : std::runtime_error {
    explicit FragmentOverflowError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure (missing file, unwritable path, malformed stream).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hybran
