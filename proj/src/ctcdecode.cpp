// Copyright 2026 The stenaug Authors
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

#include "stenaug/ctcdecode.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "stenaug/error.hpp"
#include "stenaug/utf8.hpp"

namespace stenaug {

void LogitMatrix::validate() const {
  if (timesteps < 1) throw ValueError("logit matrix needs at least 1 timestep");
  if (classes < 2) throw ValueError("logit matrix needs at least 2 classes");
  if (values.size() != static_cast<std::size_t>(timesteps) * classes)
    throw ValueError("logit matrix value count does not match T x C");
  for (double v : values)
    if (!std::isfinite(v))
      throw ValueError("logit matrix contains a non-finite value");
}

std::vector<int> argmax_path(const LogitMatrix& m) {
  m.validate();
  std::vector<int> path(m.timesteps);
  for (int t = 0; t < m.timesteps; ++t) {
    int best = 0;
    for (int c = 1; c < m.classes; ++c)
      if (m.at(t, c) > m.at(t, best)) best = c;  // ties keep the lowest index
    path[t] = best;
  }
  return path;
}

std::string collapse_path(std::span<const int> path, const Alphabet& alphabet) {
  std::u32string out;
  int prev = -1;
  for (int cls : path) {
    if (cls < 0 || cls > alphabet.size())
      throw ValueError("class index " + std::to_string(cls) +
                       " outside 0.." + std::to_string(alphabet.size()));
    if (cls != prev && cls != 0) out.push_back(alphabet.symbol(cls));
    prev = cls;
  }
  return utf8_encode(out);
}

std::string best_path_decode(const LogitMatrix& m, const Alphabet& alphabet) {
  m.validate();
  if (m.classes != alphabet.classes())
    throw ValueError("logit matrix has " + std::to_string(m.classes) +
                     " classes but the alphabet expects " +
                     std::to_string(alphabet.classes()));
  return collapse_path(argmax_path(m), alphabet);
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

namespace {

LogitMatrix read_matrix_body(std::istream& in, const std::string& where,
                             int& lineno) {
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(where + ":" + std::to_string(lineno) +
                     ": missing 'T C' header line");
  ++lineno;
  LogitMatrix m;
  {
    std::istringstream hs(line);
    if (!(hs >> m.timesteps >> m.classes))
      throw ParseError(where + ":" + std::to_string(lineno) +
                       ": malformed 'T C' header");
    std::string extra;
    if (hs >> extra)
      throw ParseError(where + ":" + std::to_string(lineno) +
                       ": trailing data after 'T C' header");
  }
  if (m.timesteps < 1 || m.classes < 2)
    throw ParseError(where + ":" + std::to_string(lineno) +
                     ": invalid dimensions " + std::to_string(m.timesteps) +
                     " x " + std::to_string(m.classes));
  m.values.resize(static_cast<std::size_t>(m.timesteps) * m.classes);
  for (int t = 0; t < m.timesteps; ++t) {
    if (!std::getline(in, line))
      throw ParseError(where + ": unexpected end of file at row " +
                       std::to_string(t));
    ++lineno;
    std::istringstream rs(line);
    for (int c = 0; c < m.classes; ++c) {
      if (!(rs >> m.at(t, c)))
        throw ParseError(where + ":" + std::to_string(lineno) +
                         ": expected " + std::to_string(m.classes) +
                         " values in row");
    }
    std::string extra;
    if (rs >> extra)
      throw ParseError(where + ":" + std::to_string(lineno) +
                       ": trailing data in row");
  }
  m.validate();
  return m;
}

void write_matrix_body(std::ostream& out, const LogitMatrix& m) {
  out << m.timesteps << ' ' << m.classes << '\n';
  char buf[64];
  for (int t = 0; t < m.timesteps; ++t) {
    for (int c = 0; c < m.classes; ++c) {
      std::snprintf(buf, sizeof buf, "%.9g", m.at(t, c));
      out << (c ? " " : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace

LogitMatrix read_logit_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path))
      throw FileNotFoundError("no such matrix file: " + path.string());
    throw Error("cannot open matrix file: " + path.string());
  }
  int lineno = 0;
  return read_matrix_body(in, path.string(), lineno);
}

void write_logit_matrix(const LogitMatrix& m,
                        const std::filesystem::path& path) {
  m.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open matrix file for writing: " + path.string());
  write_matrix_body(out, m);
}

std::vector<std::pair<std::string, LogitMatrix>> read_logit_container(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path))
      throw FileNotFoundError("no such container file: " + path.string());
    throw Error("cannot open container file: " + path.string());
  }
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line))
    throw ParseError(path.string() + ": missing record-count header");
  ++lineno;
  int count = 0;
  try {
    std::size_t pos = 0;
    count = std::stoi(line, &pos);
    if (pos != line.size() || count < 0) throw std::invalid_argument("range");
  } catch (const std::exception&) {
    throw ParseError(path.string() + ":1: record count must be a "
                     "non-negative integer, got '" + line + "'");
  }

  std::vector<std::pair<std::string, LogitMatrix>> records;
  records.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    if (!std::getline(in, line))
      throw ParseError(path.string() + ": expected " + std::to_string(count) +
                       " records, found " + std::to_string(i));
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty())
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": empty record id");
    records.emplace_back(line, read_matrix_body(in, path.string(), lineno));
  }
  return records;
}

void write_logit_container(
    std::span<const std::pair<std::string, LogitMatrix>> records,
    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot open container file for writing: " + path.string());
  out << records.size() << '\n';
  for (const auto& [id, m] : records) {
    if (id.empty() || id.find('\n') != std::string::npos)
      throw ValueError("record id must be a non-empty single line");
    m.validate();
    out << id << '\n';
    write_matrix_body(out, m);
  }
}

}  // namespace stenaug
