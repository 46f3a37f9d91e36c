#include "chdnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

namespace chdnet {

std::vector<std::string> SynthConfig::violations() const {
  std::vector<std::string> v;
  if (n_cases < 1 || n_controls < 1) v.emplace_back("synth: both classes need at least one sample");
  if (n_features < 1) v.emplace_back("synth.n_features must be >= 1");
  if (n_informative > n_features) v.emplace_back("synth.n_informative must not exceed n_features");
  if (!(effect_size > 0.0)) v.emplace_back("synth.effect_size must be > 0");
  if (!(median_intensity > 0.0)) v.emplace_back("synth.median_intensity must be > 0");
  if (!(log_sigma > 0.0)) v.emplace_back("synth.log_sigma must be > 0");
  if (!(log_median_spread >= 0.0)) v.emplace_back("synth.log_median_spread must be >= 0");
  return v;
}

SynthResult generate(const SynthConfig& cfg) {
  if (auto v = cfg.violations(); !v.empty()) throw Error(ErrorKind::Config, v.front());
  const std::size_t n = cfg.n_cases + cfg.n_controls;
  const std::size_t d = cfg.n_features;

  std::mt19937_64 layout_rng(mix_seed(cfg.seed, "synth-layout"));
  IndexList all(d);
  std::iota(all.begin(), all.end(), std::size_t{0});
  IndexList chosen;
  std::sample(all.begin(), all.end(), std::back_inserter(chosen), cfg.n_informative, layout_rng);
  std::vector<int> shift(d, 0);
  std::bernoulli_distribution up(0.5);
  SynthResult out;
  for (auto idx : chosen) {
    const int dir = up(layout_rng) ? 1 : -1;
    shift[idx] = dir;
    out.planted.push_back({idx, dir});
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector log_median(static_cast<Index>(d));
  for (Index j = 0; j < log_median.size(); ++j)
    log_median(j) = std::log(cfg.median_intensity) + cfg.log_median_spread * gauss(layout_rng);

  Matrix values(static_cast<Index>(n), static_cast<Index>(d));
  Labels labels(n);
  std::vector<std::string> sample_ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::mt19937_64 rng(mix_seed(cfg.seed, "synth-sample", i));
    const bool is_case = i < cfg.n_cases;
    labels[i] = is_case ? Label::Case : Label::Control;
    char id[32];
    std::snprintf(id, sizeof id, "S%04zu", i + 1);
    sample_ids[i] = id;
    for (std::size_t j = 0; j < d; ++j) {
      double z = gauss(rng);
      if (is_case && shift[j] != 0) z += shift[j] * cfg.effect_size;
      values(Index(i), Index(j)) = std::exp(log_median(Index(j)) + cfg.log_sigma * z);
    }
  }

  std::vector<std::string> feature_ids(d);
  for (std::size_t j = 0; j < d; ++j) {
    char id[32];
    std::snprintf(id, sizeof id, "pep_%05zu", j + 1);
    feature_ids[j] = id;
  }
  out.data = LabeledDataset(std::move(values), std::move(labels), std::move(feature_ids), std::move(sample_ids));
  return out;
}

void write_planted_csv(std::ostream& out, const SynthResult& result) {
  out << "feature_index,feature_id,direction\n";
  for (const auto& p : result.planted)
    out << p.index << ',' << result.data.feature_ids()[p.index] << ',' << p.direction << '\n';
}

Vector two_sample_t(const LabeledDataset& data) {
  const auto cases = rows_with_label(data.labels(), Label::Case);
  const auto controls = rows_with_label(data.labels(), Label::Control);
  if (cases.size() < 2 || controls.size() < 2) throw Error(ErrorKind::InvalidInput, "t-test needs 2+ per class");
  const Matrix a = take_rows(data.values(), cases);
  const Matrix b = take_rows(data.values(), controls);
  const RowVector ma = a.colwise().mean(), mb = b.colwise().mean();
  const RowVector va = (a.rowwise() - ma).colwise().squaredNorm() / double(a.rows() - 1);
  const RowVector vb = (b.rowwise() - mb).colwise().squaredNorm() / double(b.rows() - 1);
  const RowVector se = (va / double(a.rows()) + vb / double(b.rows())).cwiseSqrt();
  Vector t(data.features());
  for (Index j = 0; j < t.size(); ++j) t(j) = se(j) > 0.0 ? (ma(j) - mb(j)) / se(j) : 0.0;
  return t;
}

}  // namespace chdnet
