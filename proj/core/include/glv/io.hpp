#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "glv/field.hpp"

namespace glv {

// Binary field dump, little endian:
//   "GLF1", u32 dim, u32 node count per axis (x, y[, t]), f64 h, f64 eps,
//   u8 topology, then (re, im) f64 pairs for every node in storage order
//   (x fastest, t slowest); inactive nodes hold NaN pairs.
// The grid origin is not stored: a loaded grid is centred at 0, and a disk
// mask is centred at 0 with radius the largest active node distance.
std::vector<std::uint8_t> encode_field(const ComplexField& u);
ComplexField decode_field(const std::vector<std::uint8_t>& bytes);

void dump_field(const ComplexField& u, const std::filesystem::path& path);
ComplexField load_field(const std::filesystem::path& path);

}  // namespace glv
