#pragma once

#include "divw/types.hpp"

#include <cstdint>
#include <string>

namespace divw {

enum class FileFormat { csv, binary };

/// Loads a feature matrix. CSV: comma-separated floats, one example per row;
/// an optional header row may name a final integer "label" column.
/// Binary: the DWM1 format below.
FeatureMatrix load_features(const std::string& path, FileFormat format);

void save_features(const std::string& path, const FeatureMatrix& X, FileFormat format);

// DWM1: magic "DWM1", two u64 little-endian dims (n, d), then n*d f64
// little-endian values, row-major. Also used for similarity matrices (n x n)
// and weight vectors (n x 1).
Matrix load_dwm1(const std::string& path);
void save_dwm1(const std::string& path, const Matrix& m);

/// FNV-1a 64-bit hash of a file's bytes, for run manifests.
std::uint64_t hash_file(const std::string& path);

}  // namespace divw
