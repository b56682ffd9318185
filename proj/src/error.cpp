// Copyright 2026 The imgslim Authors
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

#include "imgslim/error.hpp"

#include <algorithm>
#include <iostream>

namespace imgslim {

void Diagnostics::warn(std::string stage, std::string message) {
  if (echo_) std::cerr << "warning: [" << stage << "] " << message << '\n';
  entries_.push_back({Severity::kWarning, std::move(stage), std::move(message)});
}

void Diagnostics::info(std::string stage, std::string message) {
  if (echo_) std::cerr << "[" << stage << "] " << message << '\n';
  entries_.push_back({Severity::kInfo, std::move(stage), std::move(message)});
}

std::size_t Diagnostics::warning_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [](const Diagnostic& d) {
        return d.severity == Severity::kWarning;
      }));
}

}  // namespace imgslim
