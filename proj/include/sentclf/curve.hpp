// Copyright 2026 The sentclf Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sentclf/errors.hpp"

namespace sentclf {

struct CurveRecord {
  int iteration = 0;
  double train_loss = 0.0;
  double test_accuracy = 0.0;
  double seconds = 0.0;

  friend bool operator==(const CurveRecord&, const CurveRecord&) = default;
};

/// Per-iteration learning curve. Iterations run 1, 2, 3, ...
class LearningCurve {
 public:
  void add(CurveRecord r) {
    const int expected = records_.empty() ? 1 : records_.back().iteration + 1;
    if (r.iteration != expected) {
      throw ParameterError("curve iteration " + std::to_string(r.iteration) + ", expected " +
                           std::to_string(expected));
    }
    records_.push_back(r);
  }

  const std::vector<CurveRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  double best_accuracy() const {
    double best = 0.0;
    for (const auto& r : records_) best = std::max(best, r.test_accuracy);
    return best;
  }

  int best_iteration() const {
    int it = 0;
    double best = -1.0;
    for (const auto& r : records_) {
      if (r.test_accuracy > best) {
        best = r.test_accuracy;
        it = r.iteration;
      }
    }
    return it;
  }

 private:
  std::vector<CurveRecord> records_;
};

namespace detail {

inline std::string shortest(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

// Fixed notation with at least four decimals, more if needed to round-trip.
inline std::string fixed_roundtrip(double v) {
  char buf[64];
  for (int prec = 4; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline double parse_field(const std::string& s, std::size_t line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ParseError("bad number '" + s + "'", line);
  return v;
}

}  // namespace detail

inline constexpr const char* kCurveHeader = "iteration,train_loss,test_accuracy,seconds";

inline std::string format_curve(const LearningCurve& curve) {
  std::string text = std::string(kCurveHeader) + "\n";
  char secs[32];
  for (const auto& r : curve.records()) {
    std::snprintf(secs, sizeof secs, "%.3f", r.seconds);
    text += std::to_string(r.iteration) + "," + detail::shortest(r.train_loss) + "," +
            detail::fixed_roundtrip(r.test_accuracy) + "," + secs + "\n";
  }
  return text;
}

inline void emit_curve(const LearningCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  const std::string text = format_curve(curve);
  if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size()))) {
    throw DataError("cannot write curve file " + path.string());
  }
}

inline LearningCurve read_curve(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCurveHeader) throw ParseError("bad curve header", 1);
  LearningCurve curve;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 4) throw ParseError("curve row needs 4 fields", lineno);
    curve.add({static_cast<int>(detail::parse_field(f[0], lineno)),
               detail::parse_field(f[1], lineno), detail::parse_field(f[2], lineno),
               detail::parse_field(f[3], lineno)});
  }
  return curve;
}

/// Markdown table of (name, accuracy) rows, best first; ties keep input order.
inline std::string compare_table(std::vector<std::pair<std::string, double>> runs) {
  std::stable_sort(runs.begin(), runs.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::size_t width = 5;
  for (const auto& [name, acc] : runs) width = std::max(width, name.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "| %-*s | %8s |\n", static_cast<int>(width), "Model", "Accuracy");
  out += buf;
  out += "|" + std::string(width + 2, '-') + "|" + std::string(10, '-') + "|\n";
  for (const auto& [name, acc] : runs) {
    char pct[32];
    std::snprintf(pct, sizeof pct, "%.2f%%", 100.0 * acc);
    std::snprintf(buf, sizeof buf, "| %-*s | %8s |\n", static_cast<int>(width), name.c_str(), pct);
    out += buf;
  }
  return out;
}

}  // namespace sentclf
