/* Copyright 2026 The LAM Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef LAM_TOOLS_CLI_H_
#define LAM_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace lam {

// Entry point of the `lam` tool (train, annotate, eval, gradcheck, synth).
// Returns 0 on success, 1 on runtime failure, 2 on usage errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace lam

#endif  // LAM_TOOLS_CLI_H_
