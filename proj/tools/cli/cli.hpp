/*
 * Copyright 2026 The npds Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef NPDS_TOOLS_CLI_HPP_
#define NPDS_TOOLS_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace npds::cli {

struct DemoAggregateReport {
  std::vector<std::string> participants;
  std::vector<double> values;
  double sum = 0.0;
  double mean = 0.0;
  // Sum of the fixed-point encodings of `values`, decoded.
  double plaintext_sum = 0.0;
  bool verified = false;
};

// Starts one in-process PDS per value, each serving HTTP on a loopback port
// and holding the value as its local answer, then runs a masked aggregation
// session across them. Throws Errc::kMinimumGroupSize for fewer than three
// values.
DemoAggregateReport demo_aggregate(const std::vector<double>& values);

// Entry point of the `npds` command. `args` excludes the program name.
// Returns the process exit code: 0 on success, 1 on operation errors (the
// error code is printed to `err`), 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace npds::cli

#endif  // NPDS_TOOLS_CLI_HPP_
