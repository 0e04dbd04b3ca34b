/*
 * Copyright 2026 The gpkrr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Reference values for small_instance(), computed in 50-digit arithmetic by
// tests/oracle/small_instance.py. The point x0 is 0.25.

#ifndef GPKRR_TESTS_SMALL_INSTANCE_HPP
#define GPKRR_TESTS_SMALL_INSTANCE_HPP

namespace gpkrr::testing::small {

constexpr double kTraceGap = 1.9059930720140665;
constexpr double kLogMarginal = -4.6735564473421085;
constexpr double kOptimalElbo = -14.51302640258616;
constexpr double kKl = 9.8394699552440511;
constexpr double kMu0 = 0.22874771985275581;
constexpr double kMu1 = 0.40177866390762931;
constexpr double kSigma00 = 0.07127177683798872;
constexpr double kSigma01 = -0.015191703563824076;
constexpr double kSigma11 = 0.12145676826186251;
constexpr double kBeta0 = 0.22146317955162161;
constexpr double kBeta1 = 0.39772242428381091;
constexpr double kNystromAt = 0.20955306507404163;
constexpr double kGpMeanAt = 0.33200538042810949;
constexpr double kSvgpVarAt = 0.65990082818743498;
constexpr double kExcessRisk = 0.11398305315552741;
constexpr double kRkhsDistanceSq = 1.49758265782211;

}  // namespace gpkrr::testing::small

#endif  // GPKRR_TESTS_SMALL_INSTANCE_HPP
