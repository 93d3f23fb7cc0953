#pragma once

// Shared, lazily built objects for the test binaries.

#include <map>
#include <memory>

#include "theta10/analysis.hpp"
#include "theta10/howe.hpp"
#include "theta10/sympgrp.hpp"
#include "theta10/weil.hpp"

namespace testing_support {

using namespace theta10;

inline std::shared_ptr<WeilEngine> engine(int q) {
  static std::map<int, std::shared_ptr<WeilEngine>> cache;
  auto& e = cache[q];
  if (!e) e = WeilEngine::create(q);
  return e;
}

inline std::shared_ptr<const HoweDecomposition> howe(int q) {
  static std::map<int, std::shared_ptr<const HoweDecomposition>> cache;
  auto& h = cache[q];
  if (!h) h = std::make_shared<HoweDecomposition>(engine(q));
  return h;
}

inline const Analysis& analysis(int q) {
  static std::map<int, std::unique_ptr<Analysis>> cache;
  auto& a = cache[q];
  if (!a) a = std::make_unique<Analysis>(howe(q));
  return *a;
}

inline const GroupTable& sp43() {
  static const GroupTable t = generate_group(engine(3)->group(), standard_generators(engine(3)->group()));
  return t;
}

inline const ClassPartition& sp43_classes() {
  static const ClassPartition c = conjugacy_classes(engine(3)->group(), sp43());
  return c;
}

inline std::vector<std::uint64_t> sp43_sizes() {
  std::vector<std::uint64_t> s;
  for (const auto& c : sp43_classes().classes) s.push_back(c.size);
  return s;
}

inline std::vector<SpMat> sp43_reps() {
  std::vector<SpMat> r;
  for (const auto& c : sp43_classes().classes) r.push_back(c.representative);
  return r;
}

}  // namespace testing_support
