// Copyright 2026 The polartax Authors.
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

// Minimal CSV plumbing: unquoted comma-separated fields, '#' comment lines,
// and the fixed 9-significant-digit number format used by every output.

#pragma once

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "polartax/core.hpp"

namespace polartax::io {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

// Reads a header line plus data rows; blank and '#' lines are skipped.
inline CsvTable read_csv(std::istream& in, const std::string& what,
                         bool allow_empty = false) {
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto fields = split(body);
    if (!have_header) {
      if (!fields.empty() && fields[0].size() >= 3 &&
          fields[0].compare(0, 3, "\xEF\xBB\xBF") == 0) {
        fields[0].erase(0, 3);
      }
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    detail::require(fields.size() == t.header.size(), ErrorKind::ParseError,
                    what + " line " + std::to_string(line_no) + ": expected " +
                        std::to_string(t.header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(line_no);
  }
  detail::require(have_header || allow_empty, ErrorKind::ParseError,
                  what + " has no header");
  return t;
}

inline void require_header(const CsvTable& t,
                           const std::vector<std::string>& expected,
                           const std::string& what) {
  detail::require(t.header == expected, ErrorKind::ParseError,
                  what + " header must be '" + [&] {
                    std::string s;
                    for (std::size_t i = 0; i < expected.size(); ++i) {
                      if (i) s += ',';
                      s += expected[i];
                    }
                    return s;
                  }() + "'");
}

inline double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::ParseError, what + ": not a number: '" + s + "'");
}

inline long long parse_int(const std::string& s, const std::string& what) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  detail::require(res.ec == std::errc{} && res.ptr == end,
                  ErrorKind::ParseError,
                  what + ": not an integer: '" + s + "'");
  return v;
}

inline std::string fmt(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& f) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out << ',';
    out << f[i];
  }
  out << '\n';
}

// Means file: optional leading `user_id` column, then one column per arm.
struct MeansFile {
  MeanMatrix means;
  std::vector<std::string> arm_names;
  std::vector<std::string> user_ids;
};

inline MeansFile read_means(std::istream& in) {
  const auto t = read_csv(in, "means file");
  MeansFile out;
  const bool has_ids = !t.header.empty() && t.header[0] == "user_id";
  const std::size_t first = has_ids ? 1 : 0;
  out.arm_names.assign(t.header.begin() + static_cast<long>(first),
                       t.header.end());
  Rows rows;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    out.user_ids.push_back(has_ids ? f[0] : std::to_string(r));
    std::vector<double> row;
    for (std::size_t c = first; c < f.size(); ++c) {
      row.push_back(parse_double(
          f[c], "means file line " + std::to_string(t.line_numbers[r])));
    }
    rows.push_back(std::move(row));
  }
  detail::require(!rows.empty(), ErrorKind::ParseError,
                  "means file has no data rows");
  try {
    out.means = MeanMatrix::from_rows(rows);
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, std::string("means file: ") + e.what());
  }
  return out;
}

inline void write_means(std::ostream& out, const MeanMatrix& means,
                        const std::vector<std::string>& arm_names,
                        const std::vector<std::string>& user_ids) {
  std::vector<std::string> header{"user_id"};
  header.insert(header.end(), arm_names.begin(), arm_names.end());
  write_row(out, header);
  for (std::size_t i = 0; i < means.n(); ++i) {
    std::vector<std::string> f{user_ids.at(i)};
    for (std::size_t j = 0; j < means.k(); ++j) f.push_back(fmt(means(i, j)));
    write_row(out, f);
  }
}

inline std::vector<std::string> default_arm_names(std::size_t k) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < k; ++j) names.push_back("arm" + std::to_string(j));
  return names;
}

}  // namespace polartax::io
