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

#include "gbsmps/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace gbsmps {

namespace {

// Reads whitespace-separated tokens, skipping '#' comment lines.
class TokenReader {
 public:
  TokenReader(std::istream& in, std::string what) : what_(std::move(what)) {
    std::string line;
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      body_ << line << '\n';
    }
  }

  long long integer() {
    std::string tok = token();
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) fail("expected an integer, got '" + tok + "'");
    return v;
  }

  Real real() {
    std::string tok = token();
    std::size_t used = 0;
    Real v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) fail("expected a number, got '" + tok + "'");
    return v;
  }

  void finish() {
    std::string extra;
    if (body_ >> extra) fail("unexpected trailing data '" + extra + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ValidationError(what_ + ": " + msg); }

 private:
  std::string token() {
    std::string tok;
    if (!(body_ >> tok)) fail("file ended early");
    return tok;
  }

  std::string what_;
  std::stringstream body_;
};

std::ifstream open_in(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + file.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + file.string());
  return out;
}

std::string fmt(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put_comment(std::ostream& out, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
}

int read_size(TokenReader& r, const char* what) {
  const long long n = r.integer();
  if (n < 1 || n > 100000) r.fail(std::string("invalid ") + what + " " + std::to_string(n));
  return static_cast<int>(n);
}

MatrixR read_real_block_stream(std::istream& in, const std::string& what) {
  TokenReader r(in, what);
  const int m = read_size(r, "mode count");
  MatrixR V(2 * m, 2 * m);
  for (int i = 0; i < 2 * m; ++i) {
    for (int j = 0; j < 2 * m; ++j) V(i, j) = r.real();
  }
  r.finish();
  return V;
}

}  // namespace

CovMatrix read_covariance(std::istream& in) {
  CovMatrix V(read_real_block_stream(in, "covariance file"));
  require_physical(V);
  return V;
}

CovMatrix read_covariance(const std::filesystem::path& file) {
  std::ifstream in = open_in(file);
  CovMatrix V(read_real_block_stream(in, file.string()));
  require_physical(V);
  return V;
}

MatrixR read_real_block(const std::filesystem::path& file) {
  std::ifstream in = open_in(file);
  return read_real_block_stream(in, file.string());
}

void write_covariance(std::ostream& out, const MatrixR& V, const std::string& comment) {
  put_comment(out, comment);
  out << V.rows() / 2 << '\n';
  for (Eigen::Index i = 0; i < V.rows(); ++i) {
    for (Eigen::Index j = 0; j < V.cols(); ++j) out << (j ? " " : "") << fmt(V(i, j));
    out << '\n';
  }
}

void write_covariance(const std::filesystem::path& file, const MatrixR& V, const std::string& comment) {
  std::ofstream out = open_out(file);
  write_covariance(out, V, comment);
}

MatrixC read_complex_matrix(std::istream& in) {
  TokenReader r(in, "complex matrix file");
  const int n = read_size(r, "dimension");
  MatrixC U(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Real re = r.real();
      U(i, j) = Complex(re, r.real());
    }
  }
  r.finish();
  return U;
}

MatrixC read_complex_matrix(const std::filesystem::path& file) {
  std::ifstream in = open_in(file);
  return read_complex_matrix(in);
}

void write_complex_matrix(std::ostream& out, const MatrixC& U, const std::string& comment) {
  put_comment(out, comment);
  out << U.rows() << '\n';
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    for (Eigen::Index j = 0; j < U.cols(); ++j) {
      out << (j ? "  " : "") << fmt(U(i, j).real()) << ' ' << fmt(U(i, j).imag());
    }
    out << '\n';
  }
}

void write_complex_matrix(const std::filesystem::path& file, const MatrixC& U,
                          const std::string& comment) {
  std::ofstream out = open_out(file);
  write_complex_matrix(out, U, comment);
}

VectorR read_vector(const std::filesystem::path& file) {
  std::ifstream in = open_in(file);
  TokenReader r(in, file.string());
  const int n = read_size(r, "length");
  VectorR v(n);
  for (int i = 0; i < n; ++i) v(i) = r.real();
  r.finish();
  return v;
}

void write_vector(const std::filesystem::path& file, const VectorR& v, const std::string& comment) {
  std::ofstream out = open_out(file);
  put_comment(out, comment);
  out << v.size() << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i) out << fmt(v(i)) << '\n';
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in = open_in(file);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& file, std::string_view bytes) {
  std::ofstream out = open_out(file);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gbsmps
