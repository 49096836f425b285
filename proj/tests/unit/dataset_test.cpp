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

#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "acr/dataset.hpp"
#include "acr/error.hpp"
#include "support.hpp"

namespace acr {
namespace {

CsvSchema with_treatment() {
  CsvSchema s;
  s.treatment = "w";
  return s;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no acr::Error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(Csv, ParsesThreeRows) {
  const Dataset d = parse_csv("y,w,x1\n1,0,0.5\n2,1,0.1\n0,1,0.2", with_treatment());
  EXPECT_EQ(d.n(), 3u);
  EXPECT_EQ(d.p(), 1u);
  EXPECT_EQ(d.y()[1], 2.0);
  EXPECT_EQ(d.w()[0], 0.0);
  EXPECT_EQ(d.x(2, 0), 0.2);
  EXPECT_EQ(d.column_names()[0], "x1");
}

TEST(Csv, RejectsNonBinaryTreatment) {
  EXPECT_EQ(code_of([] { parse_csv("y,w,x1\n1,0,0.5\n2,2,0.1\n", with_treatment()); }),
            ErrorCode::kNonBinaryTreatment);
}

TEST(Csv, IgnoresColumns) {
  std::string text = "id,y,x1,x2\n";
  for (int i = 0; i < 10; ++i) {
    text += std::to_string(100 + i) + "," + std::to_string(i) + "," + std::to_string(i * 0.5) +
            "," + std::to_string(-i) + "\n";
  }
  CsvSchema schema;
  schema.ignore = {"id"};
  const Dataset d = parse_csv(text, schema);
  EXPECT_EQ(d.n(), 10u);
  EXPECT_EQ(d.p(), 2u);
  EXPECT_EQ(d.column_names(), (std::vector<std::string>{"x1", "x2"}));
  EXPECT_FALSE(d.has_treatment());
}

TEST(Csv, ErrorCodes) {
  EXPECT_EQ(code_of([] { parse_csv("a,x1\n1,2\n3,4\n", {}); }), ErrorCode::kMissingOutcome);
  EXPECT_EQ(code_of([] { parse_csv("y,x1\n1,abc\n3,4\n", {}); }), ErrorCode::kNonNumeric);
  EXPECT_EQ(code_of([] { parse_csv("y,x1\n1,\n3,4\n", {}); }), ErrorCode::kNonNumeric);
  EXPECT_EQ(code_of([] { parse_csv("y,x1\n1,2\n", {}); }), ErrorCode::kTooFewRows);
  EXPECT_EQ(code_of([] { parse_csv("y,w\n1,1\n3,1\n", with_treatment()); }),
            ErrorCode::kEmptyArm);
  EXPECT_EQ(code_of([] { parse_csv("y,x1\n1,nan\n3,4\n", {}); }), ErrorCode::kNonFinite);
  EXPECT_EQ(code_of([] { load_csv("/nonexistent/file.csv", {}); }), ErrorCode::kIo);
}

TEST(Csv, QuotedFieldsAndCrlf) {
  const Dataset d = parse_csv("\"y\",\"x,1\"\r\n\"1.5\",2\r\n3,\"4\"\r\n", {});
  EXPECT_EQ(d.column_names()[0], "x,1");
  EXPECT_EQ(d.y()[0], 1.5);
  EXPECT_EQ(d.x(1, 0), 4.0);
}

TEST(Csv, RoundTripIsExact) {
  SyntheticSpec spec;
  spec.n = 57;
  spec.p = 4;
  spec.seed = 12;
  const Dataset d = generate_synthetic(spec);
  CsvSchema schema;
  schema.treatment = "w";
  const Dataset back = parse_csv(to_csv(d), schema);
  EXPECT_TRUE(back == d);
  const auto dir = testing::scratch_dir("csv_round_trip");
  write_csv(d, dir / "d.csv");
  EXPECT_TRUE(load_csv(dir / "d.csv", schema) == d);
}

TEST(Synthetic, DeterministicInSeed) {
  SyntheticSpec spec{100, 5, 2, 1.0, 1.0, 0.5, 1.0, 7, true};
  EXPECT_TRUE(generate_synthetic(spec) == generate_synthetic(spec));
  SyntheticSpec other = spec;
  other.seed = 8;
  EXPECT_FALSE(generate_synthetic(spec) == generate_synthetic(other));
}

TEST(Synthetic, DegenerateOutcomeIsZero) {
  SyntheticSpec spec;
  spec.noise_sd = 0.0;
  spec.tau = 0.0;
  spec.sparsity = 0;
  const Dataset d = generate_synthetic(spec);
  for (double y : d.y()) EXPECT_EQ(y, 0.0);
}

TEST(Synthetic, NoiselessOutcomeIsLinear) {
  SyntheticSpec spec;
  spec.n = 50;
  spec.p = 6;
  spec.sparsity = 2;
  spec.theta_scale = 1.5;
  spec.tau = 0.7;
  spec.noise_sd = 0.0;
  const Dataset d = generate_synthetic(spec);
  for (Index i = 0; i < d.n(); ++i) {
    const double expect = 1.5 * (d.x(i, 0) + d.x(i, 1)) + 0.7 * d.w()[i];
    EXPECT_NEAR(d.y()[i], expect, 1e-12);
  }
}

TEST(Synthetic, ArmDifferenceRecoversTau) {
  SyntheticSpec spec;
  spec.n = 10000;
  spec.tau = 2.0;
  spec.seed = 3;
  const Dataset d = generate_synthetic(spec);
  double s1 = 0, s0 = 0;
  int n1 = 0, n0 = 0;
  for (Index i = 0; i < d.n(); ++i) {
    if (d.w()[i] == 1.0) {
      s1 += d.y()[i];
      ++n1;
    } else {
      s0 += d.y()[i];
      ++n0;
    }
  }
  EXPECT_NEAR(s1 / n1 - s0 / n0, 2.0, 0.1);
  EXPECT_NEAR(static_cast<double>(n1) / d.n(), 0.5, 0.03);
}

TEST(Dataset, RowReplacementAndIdentity) {
  const Dataset a = testing::small_dataset({1, 2, 3, 4}, 2);
  const Dataset b = testing::small_dataset({10, 20, 30, 40}, 2);
  const std::vector<Index> targets = {0, 2};
  const std::vector<Index> sources = {3, 1};
  const Dataset c = a.with_rows_replaced(targets, sources, b);
  EXPECT_EQ(c.y()[0], 40.0);
  EXPECT_EQ(c.y()[1], 2.0);
  EXPECT_EQ(c.y()[2], 20.0);
  EXPECT_EQ(c.x(0, 1), b.x(3, 1));
  EXPECT_NE(c.uid(), a.uid());
  const Dataset copy = a;
  EXPECT_EQ(copy.uid(), a.uid());
}

}  // namespace
}  // namespace acr
