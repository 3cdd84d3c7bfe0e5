// Copyright 2026 The clinicl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Generates a seeded synthetic heart-disease cohort in the layout of the
// public UCI processed.*.data files: 13 attributes plus the 0-4 `num`
// target, "?" for missing cells. Labels are drawn first per sex stratum and
// features are then drawn class-conditionally from per-class marginals.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <span>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clinicl/common/random.hpp"
#include "clinicl/common/text.hpp"

namespace {

using clinicl::Rng;

constexpr int kRows = 920;
constexpr int kMales = 726;
constexpr int kMalePositives = 457;
constexpr int kFemalePositives = 52;
constexpr int kPlantedSparseRows = 2;

struct Marginal {
  double mean[2];
  double sd[2];
  double lo;
  double hi;
};

double draw_gauss(Rng& rng, const Marginal& m, int y, int decimals = 0) {
  const double v = std::clamp(m.mean[y] + m.sd[y] * rng.normal(), m.lo, m.hi);
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

template <std::size_t N>
int draw_code(Rng& rng, const std::array<double, N>& probs,
              const std::array<int, N>& codes) {
  return codes[rng.categorical(std::span<const double>(probs))];
}

// Column order of the UCI processed files.
enum Col { kAge, kSex, kCp, kBps, kChol, kFbs, kEcg, kHr, kExang, kOld, kSlope, kCa, kThal, kNum };
// Per-feature missing rates (target never missing).
constexpr std::array<double, 13> kMissingRate = {0.0,  0.0,  0.0,  0.06, 0.03, 0.09, 0.01,
                                                 0.06, 0.06, 0.07, 0.30, 0.55, 0.45};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic heart-disease cohort generator"};
  std::uint64_t seed = 20250601;
  std::string output = "-";
  app.add_option("--seed", seed, "Generator seed");
  app.add_option("--output", output, "CSV path, or - for stdout");
  CLI11_PARSE(app, argc, argv);

  Rng rng(clinicl::derive_seed(seed, "synth_heart"));

  std::vector<int> sex(kRows, 0);
  std::fill(sex.begin(), sex.begin() + kMales, 1);
  rng.shuffle(std::span<int>(sex));

  std::vector<int> label(kRows, 0);
  {
    std::vector<std::size_t> male_idx, female_idx;
    for (std::size_t i = 0; i < kRows; ++i) (sex[i] ? male_idx : female_idx).push_back(i);
    rng.shuffle(std::span<std::size_t>(male_idx));
    rng.shuffle(std::span<std::size_t>(female_idx));
    for (int k = 0; k < kMalePositives; ++k) label[male_idx[k]] = 1;
    for (int k = 0; k < kFemalePositives; ++k) label[female_idx[k]] = 1;
  }

  const Marginal age{{50.5, 55.9}, {9.4, 8.7}, 28, 77};
  const Marginal bps{{130.0, 134.0}, {16.5, 19.5}, 80, 200};
  const Marginal chol{{240.0, 250.0}, {55.0, 60.0}, 100, 560};
  const Marginal hr{{148.0, 128.0}, {23.0, 23.0}, 60, 202};

  std::vector<std::array<std::string, 14>> rows(kRows);
  for (int i = 0; i < kRows; ++i) {
    const int y = label[i];
    std::array<double, 14> v{};
    v[kAge] = draw_gauss(rng, age, y);
    v[kSex] = sex[i];
    v[kCp] = y ? draw_code(rng, std::array{0.039, 0.047, 0.143, 0.770}, std::array{1, 2, 3, 4})
               : draw_code(rng, std::array{0.063, 0.365, 0.319, 0.253}, std::array{1, 2, 3, 4});
    v[kBps] = draw_gauss(rng, bps, y);
    v[kChol] = draw_gauss(rng, chol, y);
    v[kFbs] = rng.bernoulli(y ? 0.20 : 0.11);
    v[kEcg] = y ? draw_code(rng, std::array{0.56, 0.24, 0.20}, std::array{0, 1, 2})
                : draw_code(rng, std::array{0.65, 0.14, 0.21}, std::array{0, 1, 2});
    v[kHr] = draw_gauss(rng, hr, y);
    v[kExang] = rng.bernoulli(y ? 0.59 : 0.14);
    if (rng.bernoulli(y ? 0.30 : 0.60)) {
      v[kOld] = 0.0;
    } else {
      const double mean = y ? 1.8 : 0.9;
      v[kOld] = std::round(std::clamp(mean + 0.8 * rng.normal(), 0.1, 6.2) * 10.0) / 10.0;
    }
    v[kSlope] = y ? draw_code(rng, std::array{0.14, 0.75, 0.11}, std::array{1, 2, 3})
                  : draw_code(rng, std::array{0.58, 0.37, 0.05}, std::array{1, 2, 3});
    v[kCa] = y ? draw_code(rng, std::array{0.34, 0.30, 0.22, 0.14}, std::array{0, 1, 2, 3})
               : draw_code(rng, std::array{0.79, 0.12, 0.06, 0.03}, std::array{0, 1, 2, 3});
    v[kThal] = y ? draw_code(rng, std::array{0.22, 0.10, 0.68}, std::array{3, 6, 7})
                 : draw_code(rng, std::array{0.79, 0.04, 0.17}, std::array{3, 6, 7});
    // Severity 1-4 for positives, skewed toward the low end.
    v[kNum] = y ? draw_code(rng, std::array{0.45, 0.25, 0.20, 0.10}, std::array{1, 2, 3, 4}) : 0;

    std::array<bool, 13> missing{};
    int count = 0;
    for (int c = 0; c < 13; ++c) {
      missing[c] = rng.bernoulli(kMissingRate[c]);
      count += missing[c];
    }
    // Keep ordinary rows under the drop threshold (6 of 13 cells).
    while (count > 5) {
      const auto c = rng.below(13);
      if (missing[c]) {
        missing[c] = false;
        --count;
      }
    }
    for (int c = 0; c < 14; ++c) {
      rows[i][c] = (c < 13 && missing[c]) ? "?" : clinicl::format_number(v[c]);
    }
  }

  // A few records too sparse to keep, as in the multi-site source data.
  for (const std::size_t i : clinicl::sample_without_replacement(rng, kRows, kPlantedSparseRows)) {
    for (int c : {kBps, kChol, kFbs, kHr, kExang, kOld, kSlope}) rows[i][c] = "?";
  }

  std::ofstream file;
  if (output != "-") {
    file.open(output);
    if (!file) {
      std::cerr << "cannot write " << output << "\n";
      return 1;
    }
  }
  std::ostream& out = output == "-" ? std::cout : file;
  out << "age,sex,cp,trestbps,chol,fbs,restecg,thalach,exang,oldpeak,slope,ca,thal,num\n";
  for (const auto& row : rows) {
    for (int c = 0; c < 14; ++c) out << (c ? "," : "") << row[c];
    out << "\n";
  }
  return 0;
}
