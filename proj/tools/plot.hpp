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

#pragma once

#include <string>
#include <vector>

namespace mitiknit::tools {

struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;
};

CsvData read_csv(const std::string& path);

struct PlotSpec {
  std::string x, y, series;  // column names; series may be empty
  bool log_y = false;
  std::string title;
};

/// Column choice for the known result schemas (fig4..fig8); falls back to
/// the first two columns.
PlotSpec default_spec(const CsvData& data);

/// Line chart with one polyline per series value, as standalone SVG.
std::string render_svg(const CsvData& data, const PlotSpec& spec);

}  // namespace mitiknit::tools
