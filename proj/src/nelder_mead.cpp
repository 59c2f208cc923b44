#include "mixedts/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mixedts/error.hpp"

namespace mixedts {

namespace {

struct Vertex {
  std::vector<double> x;
  PenalizedValue v;
  double f;
};

double combine(const PenalizedValue& v, double w) {
  const double f = v.distance + w * v.penalty;
  return std::isnan(f) ? HUGE_VAL : f;
}

}  // namespace

NelderMeadResult nelder_mead(const PenalizedObjective& f, std::vector<double> x0, double weight,
                             const NelderMeadOptions& o, const WeightUpdate& update) {
  if (x0.empty()) throw InvalidParameter("nelder_mead: empty start point");
  if (!(weight >= 0.0)) throw InvalidParameter("nelder_mead: negative weight");
  const std::size_t dim = x0.size();
  std::size_t evaluations = 0;
  const auto eval = [&](const std::vector<double>& x) {
    ++evaluations;
    return f(x);
  };

  if (o.max_iter == 0) {
    const PenalizedValue v = eval(x0);
    return {std::move(x0), v, weight, combine(v, weight), 0, evaluations, false};
  }

  std::vector<Vertex> simplex;
  simplex.reserve(dim + 1);
  {
    const PenalizedValue v = eval(x0);
    simplex.push_back({x0, v, combine(v, weight)});
  }
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> x = x0;
    x[i] += o.step_fraction * std::max(1.0, std::abs(x0[i]));
    const PenalizedValue v = eval(x);
    simplex.push_back({std::move(x), v, combine(v, weight)});
  }

  const auto by_f = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  std::vector<double> centroid(dim), trial(dim);
  const auto point = [&](double coef, const std::vector<double>& from) {
    // centroid + coef * (centroid - from)
    for (std::size_t j = 0; j < dim; ++j) trial[j] = centroid[j] + coef * (centroid[j] - from[j]);
    return trial;
  };

  const auto diameter = [&] {
    if (!(o.xtol > 0.0)) return 0.0;
    double d = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) d = std::max(d, std::abs(simplex[i].x[j] - simplex[0].x[j]));
    }
    return d;
  };

  std::size_t iter = 0;
  bool converged = false;
  while (true) {
    std::stable_sort(simplex.begin(), simplex.end(), by_f);
    if (simplex.back().f - simplex.front().f < o.tol && diameter() <= o.xtol) {
      converged = true;
      break;
    }
    if (iter >= o.max_iter) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i].x[j];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    Vertex& worst = simplex.back();
    const double f_best = simplex.front().f;
    const double f_second = simplex[dim - 1].f;

    std::vector<double> xr = point(o.reflection, worst.x);
    const PenalizedValue vr = eval(xr);
    const double fr = combine(vr, weight);

    if (fr < f_best) {
      std::vector<double> xe(dim);
      for (std::size_t j = 0; j < dim; ++j) xe[j] = centroid[j] + o.expansion * (xr[j] - centroid[j]);
      const PenalizedValue ve = eval(xe);
      const double fe = combine(ve, weight);
      if (fe < fr) {
        worst = {std::move(xe), ve, fe};
      } else {
        worst = {std::move(xr), vr, fr};
      }
    } else if (fr < f_second) {
      worst = {std::move(xr), vr, fr};
    } else {
      const bool outside = fr < worst.f;
      std::vector<double> xc(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        const double toward = outside ? xr[j] : worst.x[j];
        xc[j] = centroid[j] + o.contraction * (toward - centroid[j]);
      }
      const PenalizedValue vc = eval(xc);
      const double fc = combine(vc, weight);
      if (fc < (outside ? fr : worst.f)) {
        worst = {std::move(xc), vc, fc};
      } else {
        const std::vector<double>& best = simplex.front().x;
        for (std::size_t i = 1; i <= dim; ++i) {
          for (std::size_t j = 0; j < dim; ++j) {
            simplex[i].x[j] = best[j] + o.shrink * (simplex[i].x[j] - best[j]);
          }
          simplex[i].v = eval(simplex[i].x);
          simplex[i].f = combine(simplex[i].v, weight);
        }
      }
    }
    ++iter;

    if (update) {
      const auto best = std::min_element(simplex.begin(), simplex.end(), by_f);
      const double next = update(NelderMeadState{iter, best->x, best->v, weight});
      if (!(next >= 0.0)) throw NumericalError("nelder_mead: weight update returned an invalid value");
      if (next != weight) {
        weight = next;
        for (Vertex& v : simplex) v.f = combine(v.v, weight);
      }
    }
  }

  const Vertex& best = simplex.front();
  return {best.x, best.v, weight, best.f, iter, evaluations, converged};
}

}  // namespace mixedts
