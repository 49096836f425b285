// Copyright 2026 The acr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

namespace acr {

// Standard normal c.d.f., via the complementary error function.
double normal_cdf(double x) noexcept;

// Standard normal quantile, Wichura's AS 241 (PPND16). Relative accuracy is
// about 1e-16 over (0, 1); returns -inf/+inf at 0/1 and NaN outside [0, 1].
double normal_quantile(double p) noexcept;

}  // namespace acr
