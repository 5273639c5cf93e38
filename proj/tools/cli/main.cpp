// Copyright 2026 The occa Authors.
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


#include <cstdio>
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/support.hpp"

int main(int argc, char** argv) {
  CLI::App app{"occa: one-class feature adaptation on embedding matrices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", occa_version());
  const auto commands = occa_cli::add_commands(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? occa_cli::kExitOk : occa_cli::kExitUsage;
  }

  for (const auto& command : commands) {
    if (!command.app->parsed()) continue;
    try {
      command.run();
      return occa_cli::kExitOk;
    } catch (const occa_cli::StatusError& e) {
      std::cerr << "occa " << command.app->get_name() << ": " << occa_status_name(e.status())
                << " error: " << e.what() << "\n";
      return occa_cli::exit_code_for(e.status());
    } catch (const std::exception& e) {
      std::cerr << "occa " << command.app->get_name() << ": internal error: " << e.what()
                << "\n";
      return occa_cli::kExitInternal;
    }
  }
  return occa_cli::kExitUsage;
}
