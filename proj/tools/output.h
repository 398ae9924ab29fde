// Copyright 2026 The circsketch Authors.
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

// Shared output plumbing for the command-line tool: run manifests, CSV
// tables and JSON documents, all written with round-trip precision.

#ifndef CIRCSKETCH_TOOLS_OUTPUT_H_
#define CIRCSKETCH_TOOLS_OUTPUT_H_

#include <chrono>
#include <string>
#include <vector>

#include "json.hpp"

namespace circsketch::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = CIRCSKETCH_VERSION;

// Formats a double with 17 significant digits.
std::string num(double value);

// Creates dir (and parents) if needed. Throws IoError on failure.
void ensure_dir(const std::string& dir);

std::string join_path(const std::string& dir, const std::string& name);

void write_json(const Json& doc, const std::string& path);

// Writes header plus rows, one string per line.
void write_lines(const std::string& path, const std::string& header,
                 const std::vector<std::string>& rows);

// Collects what a command did. Written last, so every file it lists exists.
class Manifest {
 public:
  Manifest(std::string command, Json config, unsigned long long seed);

  // Starts a named phase; the previous phase (if any) is closed.
  void phase(const std::string& name);
  void add_output(const std::string& path);
  void write(const std::string& dir);

 private:
  void close_phase();

  std::string command_;
  Json config_;
  unsigned long long seed_;
  Json timings_ = Json::object();
  std::vector<std::string> outputs_;
  std::string current_;
  std::chrono::steady_clock::time_point started_;
};

}  // namespace circsketch::cli

#endif  // CIRCSKETCH_TOOLS_OUTPUT_H_
