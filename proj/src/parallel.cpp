// Copyright 2026 The mitiknit Authors
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

#include "mitiknit/parallel.hpp"

#include <cstdlib>
#include <string>

#include "mitiknit/circuit.hpp"

namespace mitiknit {

int worker_count() {
  const char* env = std::getenv("MITIKNIT_WORKERS");
  if (!env || !*env) return 1;
  try {
    const int w = std::stoi(env);
    if (w < 1) throw Error("MITIKNIT_WORKERS must be a positive integer");
    return w;
  } catch (const std::logic_error&) {
    throw Error("MITIKNIT_WORKERS must be a positive integer");
  }
}

}  // namespace mitiknit
