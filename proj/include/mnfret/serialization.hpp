#pragma once

#include <filesystem>

#include "mnfret/decomposition.hpp"
#include "mnfret/retrieval.hpp"

namespace mnfret {

/// `<name>.json` header (method, k, d, eigenvalues, ridge, sign tag) plus
/// `<name>.bin`: the mean, then W column-major, little-endian float64.
void save_basis(const LinearBasis& basis, const std::filesystem::path& path);

/// PCA bases are checked for W^T W = I on load.
LinearBasis load_basis(const std::filesystem::path& path);

/// `<name>.json` header plus `<name>.bin`: the intercept, then the weights
/// column-major.
void save_model(const RetrievalModel& model, const std::filesystem::path& path);
RetrievalModel load_model(const std::filesystem::path& path);

}  // namespace mnfret
