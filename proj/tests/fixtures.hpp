#pragma once

#include "chdnet/dataset.hpp"

#include <random>

namespace chdnet::fixture {

struct Planted {
  LabeledDataset data;
  IndexList informative;
};

/// Balanced Gaussian data; `informative` columns get `shift` added for
/// controls. Informative columns are spread over the index range.
inline Planted planted_gaussian(std::size_t per_class, std::size_t features, std::size_t informative, double shift,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Planted p;
  IndexList all(features);
  for (std::size_t j = 0; j < features; ++j) all[j] = j;
  std::sample(all.begin(), all.end(), std::back_inserter(p.informative), informative, rng);
  std::vector<bool> hot(features, false);
  for (auto j : p.informative) hot[j] = true;

  const std::size_t n = 2 * per_class;
  Matrix v(static_cast<Index>(n), static_cast<Index>(features));
  Labels y;
  std::vector<std::string> sid, fid;
  for (std::size_t i = 0; i < n; ++i) {
    const bool ctrl = i % 2 == 1;
    y.push_back(ctrl ? Label::Control : Label::Case);
    sid.push_back("s" + std::to_string(i));
    for (std::size_t j = 0; j < features; ++j) v(Index(i), Index(j)) = g(rng) + (ctrl && hot[j] ? shift : 0.0);
  }
  for (std::size_t j = 0; j < features; ++j) fid.push_back("f" + std::to_string(j));
  p.data = LabeledDataset(std::move(v), std::move(y), std::move(fid), std::move(sid));
  return p;
}

inline std::size_t overlap(const IndexList& a, const IndexList& b) {
  std::size_t n = 0;
  for (auto x : a) n += std::find(b.begin(), b.end(), x) != b.end();
  return n;
}

}  // namespace chdnet::fixture
