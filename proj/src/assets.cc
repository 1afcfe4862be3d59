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

#include "vulnbench/assets.h"

#include <string>

#include "vulnbench/errors.h"

namespace vulnbench {

std::string_view bundled_asset(std::string_view path) {
  for (const BundledAsset& asset : bundled_assets()) {
    if (asset.path == path) return asset.content;
  }
  throw Error("no bundled asset '" + std::string(path) + "'");
}

std::vector<std::string> bundled_asset_paths(std::string_view prefix) {
  std::vector<std::string> paths;
  for (const BundledAsset& asset : bundled_assets()) {
    if (asset.path.starts_with(prefix)) paths.emplace_back(asset.path);
  }
  return paths;
}

}  // namespace vulnbench
