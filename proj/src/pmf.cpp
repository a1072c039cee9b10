#include "bincat/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bincat/errors.hpp"
#include "bincat/kernels.hpp"

namespace bincat {

namespace {

// Entries of a kernel row below this fraction of the modal value are dropped.
constexpr double kRowFloor = 1e-300;

void drop_trailing_zeros(std::vector<double>& probs) {
  while (probs.size() > 1 && probs.back() == 0.0) probs.pop_back();
  if (probs.empty()) probs.push_back(0.0);
}

void fold_tail(std::vector<double>& probs, double& tail, double budget) {
  drop_trailing_zeros(probs);
  while (probs.size() > 1 && tail + probs.back() <= budget) {
    tail += probs.back();
    probs.pop_back();
    drop_trailing_zeros(probs);
  }
}

}  // namespace

Pmf::Pmf() : probs_{1.0} {}

Pmf::Pmf(std::vector<double> probs, double tail_mass)
    : probs_(std::move(probs)), tail_mass_(tail_mass) {
  if (probs_.empty()) throw InvalidArgument("pmf needs at least one entry");
  if (!(tail_mass_ >= 0.0) || !std::isfinite(tail_mass_)) {
    throw InvalidArgument("pmf tail mass must be finite and non-negative");
  }
  for (double v : probs_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("pmf entries must be finite and non-negative");
    }
  }
  const double total = mass() + tail_mass_;
  if (std::fabs(total - 1.0) > 1e-9) {
    throw InvalidArgument("pmf total mass " + std::to_string(total) +
                          " differs from 1");
  }
  drop_trailing_zeros(probs_);
}

Pmf::Pmf(Unchecked, std::vector<double> probs, double tail_mass)
    : probs_(std::move(probs)), tail_mass_(tail_mass) {}

Pmf make_pmf_unchecked(std::vector<double> probs, double tail_mass, double budget) {
  fold_tail(probs, tail_mass, budget);
  return Pmf(Pmf::Unchecked{}, std::move(probs), tail_mass);
}

Pmf Pmf::delta(Count x) {
  std::vector<double> probs(x + 1, 0.0);
  probs[x] = 1.0;
  return Pmf(Unchecked{}, std::move(probs), 0.0);
}

double Pmf::mass() const { return kernels::sum(probs_); }

double Pmf::mean() const {
  double acc = 0.0;
  for (std::size_t k = 1; k < probs_.size(); ++k) {
    acc += static_cast<double>(k) * probs_[k];
  }
  return acc;
}

double Pmf::pgf(double s) const {
  double acc = 0.0;
  for (std::size_t k = probs_.size(); k-- > 0;) acc = acc * s + probs_[k];
  return acc;
}

Pmf Pmf::truncated(double budget) const {
  return make_pmf_unchecked(probs_, tail_mass_, budget);
}

Pmf delta(Count x) { return Pmf::delta(x); }

// ---------------------------------------------------------------------------
// ThinningKernel

ThinningKernel::ThinningKernel(double q) : q_(q), offset_{0} {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw InvalidArgument("thinning probability must lie in [0,1]");
  }
}

void ThinningKernel::reserve_rows(Count n) {
  while (lo_.size() <= n) build_row(lo_.size());
}

ThinningKernel::Row ThinningKernel::row(Count i) {
  reserve_rows(i);
  const std::size_t begin = offset_[i];
  const std::size_t end = offset_[i + 1];
  return Row{lo_[i], std::span<const double>(data_.data() + begin, end - begin)};
}

void ThinningKernel::build_row(Count i) {
  if (i == 0 || q_ == 0.0) {
    lo_.push_back(0);
    data_.push_back(1.0);
    offset_.push_back(data_.size());
    return;
  }
  if (q_ == 1.0) {
    lo_.push_back(i);
    data_.push_back(1.0);
    offset_.push_back(data_.size());
    return;
  }
  const double n = static_cast<double>(i);
  const double odds = q_ / (1.0 - q_);
  const Count mode = std::min<Count>(i, static_cast<Count>(std::floor((n + 1.0) * q_)));

  // Walk down from the mode, then up; values are relative to P(mode) = 1.
  std::vector<double> down;
  double v = 1.0;
  for (Count j = mode; j > 0; --j) {
    v *= static_cast<double>(j) / ((n - static_cast<double>(j) + 1.0) * odds);
    if (v < kRowFloor) break;
    down.push_back(v);
  }
  std::vector<double> up;
  v = 1.0;
  for (Count j = mode; j < i; ++j) {
    v *= (n - static_cast<double>(j)) / (static_cast<double>(j) + 1.0) * odds;
    if (v < kRowFloor) break;
    up.push_back(v);
  }
  const Count lo = mode - down.size();
  const std::size_t start = data_.size();
  data_.insert(data_.end(), down.rbegin(), down.rend());
  data_.push_back(1.0);
  data_.insert(data_.end(), up.begin(), up.end());
  std::span<double> values(data_.data() + start, data_.size() - start);
  const double total = kernels::sum(values);
  kernels::scale(1.0 / total, values);
  lo_.push_back(lo);
  offset_.push_back(data_.size());
}

// ---------------------------------------------------------------------------
// Operations

namespace {

std::vector<double> thin_into(const Pmf& dist, ThinningKernel& kernel,
                              double weight, std::size_t out_size) {
  std::vector<double> out(out_size, 0.0);
  const auto probs = dist.probs();
  kernel.reserve_rows(probs.size() - 1);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] == 0.0) continue;
    const auto row = kernel.row(i);
    kernels::axpy(weight * probs[i], row.values,
                  std::span<double>(out.data() + row.lo, row.values.size()));
  }
  return out;
}

}  // namespace

Evolver::Evolver(const ModelParams& params, double budget)
    : params_(params), budget_(budget), catastrophe_(1.0 - params.c()) {}

Pmf Evolver::step(const Pmf& dist) {
  const double p = params_.p();
  auto probs = dist.probs();
  std::vector<double> out = thin_into(dist, catastrophe_, 1.0 - p, probs.size() + 1);
  kernels::axpy(p, probs, std::span<double>(out.data() + 1, probs.size()));
  return make_pmf_unchecked(std::move(out), dist.tail_mass(), budget_);
}

Pmf Evolver::run(Pmf dist, Count steps) {
  for (Count t = 0; t < steps; ++t) dist = step(dist);
  return dist;
}

Pmf evolve(const Pmf& dist, const ModelParams& params, double budget) {
  Evolver evolver(params, budget);
  return evolver.step(dist);
}

Pmf binomial_thin(const Pmf& dist, double keep, double budget) {
  ThinningKernel kernel(keep);
  std::vector<double> out = thin_into(dist, kernel, 1.0, dist.size());
  return make_pmf_unchecked(std::move(out), dist.tail_mass(), budget);
}

Pmf convolve(const Pmf& a, const Pmf& b, double budget) {
  const Pmf& shorter = a.size() <= b.size() ? a : b;
  const Pmf& longer = a.size() <= b.size() ? b : a;
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  const auto s = shorter.probs();
  const auto l = longer.probs();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == 0.0) continue;
    kernels::axpy(s[i], l, std::span<double>(out.data() + i, l.size()));
  }
  return make_pmf_unchecked(std::move(out), a.tail_mass() + b.tail_mass(), budget);
}

Pmf geom_minus(double alpha, double budget) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidArgument("Geom^- parameter must lie in (0,1]");
  }
  if (alpha == 1.0) return Pmf::delta(0);
  const double ratio = 1.0 - alpha;
  std::vector<double> probs;
  double power = 1.0;  // ratio^k
  while (true) {
    probs.push_back(alpha * power);
    power *= ratio;
    if (power < budget) break;
  }
  // tail = ratio^(K+1) = power
  return make_pmf_unchecked(std::move(probs), power, budget);
}

Pmf poisson(double beta, double budget) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("Poisson mean must be finite and non-negative");
  }
  if (beta == 0.0) return Pmf::delta(0);
  std::vector<double> probs;
  if (beta < 700.0) {
    double v = std::exp(-beta);
    probs.push_back(v);
    for (Count k = 1;; ++k) {
      v *= beta / static_cast<double>(k);
      probs.push_back(v);
      const double next = v * beta / static_cast<double>(k + 1);
      if (static_cast<double>(k + 2) > beta) {
        // P(X > k) <= P(k+1) / (1 - beta / (k+2))
        const double bound = next / (1.0 - beta / static_cast<double>(k + 2));
        if (bound < budget) {
          return make_pmf_unchecked(std::move(probs), bound, budget);
        }
      }
    }
  }
  // Large means: walk outward from the mode in log space.
  const Count mode = static_cast<Count>(std::floor(beta));
  const double log_mode = -beta + static_cast<double>(mode) * std::log(beta) -
                          std::lgamma(static_cast<double>(mode) + 1.0);
  probs.assign(mode + 1, 0.0);
  probs[mode] = std::exp(log_mode);
  for (Count k = mode; k > 0; --k) {
    probs[k - 1] = probs[k] * static_cast<double>(k) / beta;
  }
  for (Count k = mode;; ++k) {
    const double next = probs[k] * beta / static_cast<double>(k + 1);
    const double bound = next / (1.0 - beta / static_cast<double>(k + 2));
    if (static_cast<double>(k + 2) > beta && bound < budget) {
      return make_pmf_unchecked(std::move(probs), bound, budget);
    }
    probs.push_back(next);
  }
}

TvResult tv_distance(const Pmf& a, const Pmf& b) {
  const auto pa = a.probs();
  const auto pb = b.probs();
  const std::size_t common = std::min(pa.size(), pb.size());
  double l1 = kernels::abs_diff_sum(pa.first(common), pb.first(common));
  const auto& rest = pa.size() > common ? pa.subspan(common) : pb.subspan(common);
  l1 += kernels::sum(rest);
  return TvResult{0.5 * l1, 0.5 * (a.tail_mass() + b.tail_mass())};
}

Pmf empirical_pmf(std::span<const Count> samples) {
  if (samples.empty()) throw InvalidArgument("empirical pmf of no samples");
  const Count top = *std::max_element(samples.begin(), samples.end());
  std::vector<double> counts(top + 1, 0.0);
  for (Count s : samples) counts[s] += 1.0;
  const double n = static_cast<double>(samples.size());
  for (double& v : counts) v /= n;
  return Pmf(std::move(counts), 0.0);
}

void to_json(nlohmann::json& j, const Pmf& pmf) {
  j = nlohmann::json{{"probs", std::vector<double>(pmf.probs().begin(), pmf.probs().end())},
                     {"tail_mass", pmf.tail_mass()}};
}

void from_json(const nlohmann::json& j, Pmf& pmf) {
  pmf = Pmf(j.at("probs").get<std::vector<double>>(), j.at("tail_mass").get<double>());
}

}  // namespace bincat
