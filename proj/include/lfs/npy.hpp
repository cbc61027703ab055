#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lfs/numerics.hpp"

namespace lfs::npy {

// Little-endian float32 array in the NPY version 1.0 container. One or two
// dimensions; C order. The header is space-padded so that the total length of
// magic + version + header-size field + header is a multiple of 64, matching
// the reference writer byte for byte.
struct Array {
    std::vector<size_t> shape; // 1-D {n} or 2-D {rows, cols}
    std::vector<float> data;   // row-major

    size_t rows() const { return shape.empty() ? 0 : shape[0]; }
    size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }
};

// Serialize / write. Throws InvalidArgument when shape and data disagree,
// IoError on filesystem failures.
std::vector<unsigned char> encode(const Array& array);
void save(const std::filesystem::path& path, const Array& array);

// Parse / read. Strict: bad magic, unsupported version or dtype, Fortran
// order, or a byte count that does not match the declared shape all raise
// FormatError. Never returns a partial array.
Array decode(const std::vector<unsigned char>& bytes);
Array load(const std::filesystem::path& path);

// Conversions between the float32 container and the double-precision Matrix
// used internally; narrowing to float happens here, explicitly.
Array from_matrix(const Matrix& m);
Matrix to_matrix(const Array& array); // requires 2-D

Array from_latents(const std::vector<LatentVector>& latents);
std::vector<LatentVector> to_latents(const Array& array); // requires 2-D

} // namespace lfs::npy
