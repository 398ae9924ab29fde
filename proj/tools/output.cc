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

#include "output.h"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>

#include "circsketch/errors.h"

namespace circsketch::cli {

std::string num(double value) { return fmt::format("{:.17g}", value); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_json(const Json& doc, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

void write_lines(const std::string& path, const std::string& header,
                 const std::vector<std::string>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << header << '\n';
  for (const std::string& row : rows) out << row << '\n';
  if (!out) throw IoError("write failed for " + path);
}

Manifest::Manifest(std::string command, Json config, unsigned long long seed)
    : command_(std::move(command)), config_(std::move(config)), seed_(seed) {}

void Manifest::phase(const std::string& name) {
  close_phase();
  current_ = name;
  started_ = std::chrono::steady_clock::now();
}

void Manifest::close_phase() {
  if (current_.empty()) return;
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - started_;
  timings_[current_] = timings_.value(current_, 0.0) + elapsed.count();
  current_.clear();
}

void Manifest::add_output(const std::string& path) { outputs_.push_back(path); }

void Manifest::write(const std::string& dir) {
  close_phase();
  const std::string path = join_path(dir, "manifest.json");
  Json doc;
  doc["command"] = command_;
  doc["version"] = kVersion;
  doc["seed"] = seed_;
  doc["config"] = config_;
  doc["outputs"] = outputs_;
  doc["timings"] = timings_;
  write_json(doc, path);
}

}  // namespace circsketch::cli
