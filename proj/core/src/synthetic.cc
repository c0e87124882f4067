/*
 * Copyright 2026 The snapgap Authors.
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

#include "snapgap/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "snapgap/error.h"
#include "snapgap/random.h"

namespace snapgap {

namespace {

struct Moments {
  double mean;
  double sd;
};

// Predictor distributions in percent, by area then predictor.
constexpr std::array<std::array<Moments, kNumPredictors>, 4> kPredictorMoments = {{
    {{{12.0, 8.0}, {15.0, 7.0}, {10.0, 5.0}, {25.0, 8.0}}},  // urban
    {{{5.0, 3.0}, {22.0, 8.0}, {14.0, 6.0}, {35.0, 8.0}}},   // rural
    {{{8.0, 5.0}, {18.0, 7.0}, {12.0, 5.0}, {30.0, 8.0}}},   // mixed
    {{{9.0, 6.0}, {18.0, 7.0}, {12.0, 5.0}, {30.0, 8.0}}},   // unknown
}};

constexpr Moments kPoverty = {0.22, 0.08};
constexpr double kPovertyYearlySd = 0.02;

double Logit(double p) { return std::log(p / (1.0 - p)); }

double Logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct Draw {
  std::size_t zip_index = 0;
  Area area = Area::kUnknown;
  double poverty = 0.0;
  double universe = 0.0;
  double pov = 0.0;
  std::array<double, kNumPredictors> z{};
  std::array<bool, kNumPredictors> missing{};
  double noise = 0.0;
  bool anomaly = false;
  double anomaly_excess = 0.0;
};

struct ZipBase {
  Area area = Area::kUnknown;
  double poverty = 0.0;
  double universe = 0.0;
  std::array<double, kNumPredictors> z{};
};

std::string ZipCode(std::size_t index) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%05zu", index + 1000);
  return buf;
}

Area AreaFromIndex(std::size_t i) {
  static constexpr Area kAreas[] = {Area::kUrban, Area::kRural, Area::kMixed, Area::kUnknown};
  return kAreas[i];
}

std::size_t AreaIndex(Area a) {
  switch (a) {
    case Area::kUrban: return 0;
    case Area::kRural: return 1;
    case Area::kMixed: return 2;
    case Area::kUnknown: return 3;
  }
  return 3;
}

}  // namespace

void SyntheticSpec::Validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::kInvalidSpec, msg); };
  if (n_zips == 0) fail("n_zips must be positive");
  if (n_zips > 99000) fail("n_zips exceeds the five-digit zip space");
  if (first_year > last_year) fail("first_year after last_year");
  if (first_year < kFirstValidYear || last_year > kLastValidYear) {
    fail("years must lie in 2014-2023");
  }
  double total = 0.0;
  for (double f : area_mix) {
    if (!(f >= 0.0) || f > 1.0) fail("area_mix entries must lie in [0, 1]");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) fail("area_mix must sum to 1");
  auto prevalence_ok = [](double p) { return p > 0.0 && p < 1.0; };
  if (!prevalence_ok(target_prevalence)) fail("target_prevalence must lie in (0, 1)");
  if (target_prevalence_end && !prevalence_ok(*target_prevalence_end)) {
    fail("target_prevalence_end must lie in (0, 1)");
  }
  if (!(anomaly_rate >= 0.0 && anomaly_rate <= 1.0)) fail("anomaly_rate must lie in [0, 1]");
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) fail("missing_rate must lie in [0, 1)");
  if (!(base_uptake > 0.0 && base_uptake < 1.0)) fail("base_uptake must lie in (0, 1)");
  if (!(uptake_noise >= 0.0) || !std::isfinite(uptake_noise)) fail("uptake_noise must be finite and >= 0");
  if (!(persistence >= 0.0 && persistence <= 1.0)) fail("persistence must lie in [0, 1]");
  for (double c : true_coefficients) {
    if (!std::isfinite(c)) fail("coefficients must be finite");
  }
  for (double s : area_uptake_shift) {
    if (!std::isfinite(s)) fail("area shifts must be finite");
  }
}

double SyntheticSpec::TargetFor(int year) const {
  if (!target_prevalence_end || last_year == first_year) return target_prevalence;
  const double t = static_cast<double>(year - first_year) / (last_year - first_year);
  return target_prevalence + t * (*target_prevalence_end - target_prevalence);
}

SyntheticPanel GenerateSynthetic(const SyntheticSpec& spec) {
  spec.Validate();
  SyntheticPanel out;
  out.truth.coefficients = spec.true_coefficients;

  std::vector<ZipBase> bases(spec.n_zips);
  {
    RandomEngine rng(DeriveSeed(spec.seed, "zips"));
    for (ZipBase& b : bases) {
      const double u = UniformUnit(rng);
      double acc = 0.0;
      std::size_t area = 3;
      for (std::size_t a = 0; a < 4; ++a) {
        acc += spec.area_mix[a];
        if (u < acc) {
          area = a;
          break;
        }
      }
      // Guard against rounding in the cumulative sum.
      while (spec.area_mix[area] == 0.0 && area > 0) --area;
      b.area = AreaFromIndex(area);
      b.poverty = kPoverty.mean + kPoverty.sd * StandardNormal(rng);
      b.universe = std::max(30.0, std::round(std::exp(std::log(800.0) + 0.6 * StandardNormal(rng))));
      for (double& z : b.z) z = StandardNormal(rng);
    }
  }

  const double persistent = std::sqrt(spec.persistence);
  const double transient = std::sqrt(1.0 - spec.persistence);
  const double base_logit = Logit(spec.base_uptake);
  LabelConfig label_config;

  for (int year = spec.first_year; year <= spec.last_year; ++year) {
    RandomEngine rng(DeriveSeed(spec.seed, "year", static_cast<std::uint64_t>(year)));
    std::vector<Draw> draws(spec.n_zips);
    for (std::size_t i = 0; i < spec.n_zips; ++i) {
      const ZipBase& b = bases[i];
      Draw& d = draws[i];
      d.zip_index = i;
      d.area = b.area;
      d.poverty = std::clamp(b.poverty + kPovertyYearlySd * StandardNormal(rng), 0.01, 0.95);
      d.universe = std::max(30.0, std::round(b.universe * (1.0 + 0.03 * StandardNormal(rng))));
      d.pov = std::max(1.0, std::round(d.poverty * d.universe));
      for (std::size_t j = 0; j < kNumPredictors; ++j) {
        d.z[j] = persistent * b.z[j] + transient * StandardNormal(rng);
        d.missing[j] = UniformUnit(rng) < spec.missing_rate;
      }
      d.noise = spec.uptake_noise * StandardNormal(rng);
      d.anomaly = UniformUnit(rng) < spec.anomaly_rate;
      d.anomaly_excess = 0.05 + 0.45 * UniformUnit(rng);
    }

    std::vector<ZipRecord> records(spec.n_zips);
    for (std::size_t i = 0; i < spec.n_zips; ++i) {
      const Draw& d = draws[i];
      ZipRecord& r = records[i];
      r.zip = ZipCode(d.zip_index);
      r.year = year;
      r.area = d.area;
      r.pov_fam = d.pov;
      r.fam_universe = d.universe;
      const auto& moments = kPredictorMoments[AreaIndex(d.area)];
      for (std::size_t j = 0; j < kNumPredictors; ++j) {
        if (d.missing[j]) continue;
        const double pct = moments[j].mean + moments[j].sd * d.z[j];
        r.predictors[j] = std::clamp(pct, 0.0, 100.0);
      }
      if (d.anomaly) {
        r.snap_fam = std::ceil(d.pov * (1.0 + d.anomaly_excess));
        r.flags.Set(RecordFlag::kSnapExceedsPoverty);
      }
    }

    auto materialize = [&](double kappa) {
      for (std::size_t i = 0; i < spec.n_zips; ++i) {
        const Draw& d = draws[i];
        if (d.anomaly) continue;
        double logit = base_logit + spec.area_uptake_shift[AreaIndex(d.area)] + d.noise;
        for (std::size_t j = 0; j < kNumPredictors; ++j) {
          logit -= spec.true_coefficients[j] * d.z[j];
        }
        logit -= kappa * (d.poverty - kPoverty.mean) / kPoverty.sd;
        // At least one enrolled family keeps the row out of the zero-uptake
        // exclusion.
        records[i].snap_fam = std::max(1.0, std::round(Logistic(logit) * d.pov));
      }
    };
    auto prevalence_at = [&](double kappa) {
      materialize(kappa);
      try {
        return BuildLabels(records, label_config).prevalence;
      } catch (const Error&) {
        return 0.0;
      }
    };

    // Prevalence rises with kappa: stronger coupling of poverty and low
    // uptake puts more of the low-uptake tail inside the high-poverty tail.
    const double target = spec.TargetFor(year);
    double lo = -8.0, hi = 8.0;
    double best_kappa = 0.0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 32; ++iter) {
      const double mid = 0.5 * (lo + hi);
      const double prev = prevalence_at(mid);
      const double gap = std::abs(prev - target);
      if (gap < best_gap) {
        best_gap = gap;
        best_kappa = mid;
      }
      if (prev < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    materialize(best_kappa);

    SyntheticYear info;
    info.year = year;
    info.target_prevalence = target;
    info.kappa = best_kappa;
    try {
      const LabeledPanel labeled = BuildLabels(records, label_config);
      info.realized_prevalence = labeled.prevalence;
      info.eligible = labeled.eligible;
      for (const LabeledRow& row : labeled.rows) {
        out.truth.labels.push_back(static_cast<int>(row.y));
      }
    } catch (const Error&) {
      out.truth.labels.insert(out.truth.labels.end(), records.size(), -1);
    }
    for (std::size_t i = 0; i < spec.n_zips; ++i) {
      if (draws[i].anomaly) ++info.anomalies;
      out.truth.latent.push_back(draws[i].z);
    }
    out.truth.planted_anomalies += info.anomalies;
    out.truth.years.push_back(info);
    for (ZipRecord& r : records) out.records.push_back(std::move(r));
  }
  return out;
}

}  // namespace snapgap
