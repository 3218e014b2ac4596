// Copyright 2026 The gbsmps Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Plain-text matrix files.
//
//   covariance: a line with M, then 2M rows of 2M reals (xxpp order)
//   complex:    a line with n, then n rows of n "re im" pairs
//
// Lines starting with '#' are comments. Writers emit 17 significant digits so
// files round-trip exactly.

#ifndef GBSMPS_IO_HPP
#define GBSMPS_IO_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gbsmps/gaussian.hpp"
#include "gbsmps/types.hpp"

namespace gbsmps {

CovMatrix read_covariance(std::istream& in);
CovMatrix read_covariance(const std::filesystem::path& file);
/// Raw 2M x 2M real matrix in the covariance layout (no physicality check).
MatrixR read_real_block(const std::filesystem::path& file);
void write_covariance(std::ostream& out, const MatrixR& V, const std::string& comment = "");
void write_covariance(const std::filesystem::path& file, const MatrixR& V,
                      const std::string& comment = "");

MatrixC read_complex_matrix(std::istream& in);
MatrixC read_complex_matrix(const std::filesystem::path& file);
void write_complex_matrix(std::ostream& out, const MatrixC& U, const std::string& comment = "");
void write_complex_matrix(const std::filesystem::path& file, const MatrixC& U,
                          const std::string& comment = "");

/// One real per line after a count line.
VectorR read_vector(const std::filesystem::path& file);
void write_vector(const std::filesystem::path& file, const VectorR& v,
                  const std::string& comment = "");

/// Whole file as bytes; throws ValidationError when it cannot be opened.
std::string read_file(const std::filesystem::path& file);
void write_file(const std::filesystem::path& file, std::string_view bytes);

/// 64-bit FNV-1a digest as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace gbsmps

#endif  // GBSMPS_IO_HPP
