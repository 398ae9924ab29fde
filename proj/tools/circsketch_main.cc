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

// circsketch: partial circulant approximation of linear dimensionality
// reduction maps.
//
// Exit codes: 0 success, 1 I/O or validation, 2 resource or budget,
// 3 solver convergence.

#include <iostream>
#include <new>

#include "CLI11.hpp"
#include "circsketch/errors.h"
#include "circsketch/parallel.h"
#include "commands.h"
#include "output.h"

namespace {

int fail(int code, const char* what) {
  std::cerr << "circsketch: error: " << what << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = circsketch::cli;
  CLI::App app{"Partial circulant approximation of dimensionality reduction maps"};
  app.set_version_flag("--version", cli::kVersion);
  app.require_subcommand(1);
  cli::Flags flags;
  const cli::CommandTable table = cli::register_commands(app, flags);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  if (flags.threads == 0) flags.threads = circsketch::default_threads();

  try {
    for (const auto& [cmd, run] : table) {
      if (cmd->parsed()) return run();
    }
    return fail(1, "no command given");
  } catch (const circsketch::BudgetExceededError& e) {
    return fail(2, e.what());
  } catch (const circsketch::ConvergenceError& e) {
    return fail(3, e.what());
  } catch (const circsketch::NumericalError& e) {
    return fail(3, e.what());
  } catch (const std::bad_alloc&) {
    return fail(2, "out of memory");
  } catch (const std::exception& e) {
    return fail(1, e.what());
  }
}
