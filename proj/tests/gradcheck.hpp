#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "alice/autodiff.hpp"

namespace alice::testing {

struct GradCheck {
  double max_relative_error = 0.0;
  std::size_t entries = 0;
};

// Central differences against reverse mode. The relative error of each entry
// is |a - n| / max(|a|, |n|, floor); the floor keeps entries whose true
// gradient is ~0 from dividing rounding noise by nothing.
inline GradCheck gradient_check(const std::vector<ad::Tensor*>& params,
                                const std::function<ad::Var(ad::Tape&)>& loss, double step = 1e-5,
                                double floor = 1e-4) {
  for (auto* p : params) p->zero_grad();
  {
    ad::Tape tape;
    tape.backward(loss(tape));
  }
  GradCheck out;
  for (auto* p : params) {
    const ad::Matrix analytic = p->grad();
    for (ad::Index i = 0; i < p->size(); ++i) {
      double& x = p->values().data()[i];
      const double keep = x;
      x = keep + step;
      double up;
      {
        ad::Tape t;
        up = loss(t).item();
      }
      x = keep - step;
      double down;
      {
        ad::Tape t;
        down = loss(t).item();
      }
      x = keep;
      const double numeric = (up - down) / (2 * step);
      const double a = analytic.data()[i];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
      out.max_relative_error = std::max(out.max_relative_error, rel);
      ++out.entries;
    }
  }
  for (auto* p : params) p->zero_grad();
  return out;
}

inline ad::Tensor random_tensor(ad::Index r, ad::Index c, ad::Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ad::Tensor t(r, c);
  for (ad::Index i = 0; i < t.size(); ++i) t.values().data()[i] = u(rng);
  return t;
}

}  // namespace alice::testing
