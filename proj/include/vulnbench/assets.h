// Copyright 2026 The VulnBench Authors
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

#ifndef VULNBENCH_ASSETS_H_
#define VULNBENCH_ASSETS_H_

#include <string>
#include <string_view>
#include <vector>

namespace vulnbench {

struct BundledAsset {
  std::string_view path;  // relative to the repository's assets/ directory
  std::string_view content;
};

// Every file under assets/, compiled in at build time.
const std::vector<BundledAsset>& bundled_assets();

// Content of a bundled asset. Throws vulnbench::Error when absent.
std::string_view bundled_asset(std::string_view path);

// Paths of bundled assets under `prefix` (e.g. "snippets/"), sorted.
std::vector<std::string> bundled_asset_paths(std::string_view prefix);

}  // namespace vulnbench

#endif  // VULNBENCH_ASSETS_H_
