#pragma once

#include <initializer_list>
#include <string>

#include <doctest.h>

#include "ouhardy/error.hpp"
#include "ouhardy/grid.hpp"

namespace ouh::test {

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

template <class F>
void expect_kind(ErrorKind kind, F&& f) {
  try {
    f();
    FAIL("expected " << std::string(to_string(kind)));
  } catch (const Error& e) {
    CHECK(e.kind() == kind);
  }
}

inline ProblemConfig one_pole(const Vec& a, double coupling) {
  ProblemConfig cfg;
  cfg.dimension = static_cast<int>(a.size());
  cfg.poles = {a};
  cfg.matrix_a = Mat::Identity(a.size(), a.size());
  cfg.coupling_c = coupling;
  return cfg;
}

}  // namespace ouh::test
