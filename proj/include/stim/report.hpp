// Copyright 2026 The stim Authors.
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
#include <string_view>

#include "stim/eval.hpp"

namespace stim {

enum class ReportFormat { table, csv };

ReportFormat parse_report_format(std::string_view name);

/// One row per category, then "overall". Columns: samples, 2AFC, then r_rf
/// for each shift. The table prints 6 significant digits; CSV prints 17.
std::string format_report(const EvalReport& report, ReportFormat format);

EvalReport parse_report_csv(std::string_view text);

/// printf("%.6g").
std::string six_digits(double v);

}  // namespace stim
