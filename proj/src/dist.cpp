#include "cbt/dist.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "cbt/error.hpp"

namespace cbt {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_domain: return "invalid-domain";
    case ErrorCode::capacity: return "capacity";
    case ErrorCode::model_violation: return "model-violation";
    case ErrorCode::invalid_network: return "invalid-network";
    case ErrorCode::protocol_refused: return "protocol-refused";
    case ErrorCode::parse: return "parse";
  }
  return "unknown";
}

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidDomain("distribution needs n >= 1");
  if (probs_.size() > 0xffffffffu) throw InvalidDomain("domain too large");
  double sum = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0)
      throw InvalidArgument("probabilities must be finite and non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw InvalidArgument("probabilities sum to " + std::to_string(sum) + ", not 1");

  // Vose alias table.
  const std::size_t n = probs_.size();
  accept_.assign(n, 1.0);
  alias_.resize(n);
  std::iota(alias_.begin(), alias_.end(), 0u);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = probs_[i] * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    accept_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding, except that a zero-mass column must never
  // accept itself.
  std::uint32_t some_positive = 0;
  while (probs_[some_positive] == 0.0) ++some_positive;
  for (auto i : small) {
    accept_[i] = probs_[i] == 0.0 ? 0.0 : 1.0;
    alias_[i] = probs_[i] == 0.0 ? some_positive : i;
  }
  for (auto i : large) accept_[i] = 1.0;
}

Symbol Distribution::draw(Engine& engine) const {
  const std::uint64_t n = probs_.size();
  const std::uint64_t column = std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine);
  const double coin = std::generate_canonical<double, 64>(engine);
  const std::uint32_t pick = coin < accept_[column] ? static_cast<std::uint32_t>(column)
                                                    : alias_[column];
  return pick + 1;
}

Distribution make_uniform(std::uint32_t n) {
  if (n == 0) throw InvalidDomain("uniform distribution needs n >= 1");
  return Distribution(std::vector<double>(n, 1.0 / n));
}

Distribution make_bump(std::uint32_t n, double eps) {
  if (n == 0) throw InvalidDomain("bump distribution needs n >= 1");
  if (n % 2 != 0) throw InvalidArgument("bump distribution needs an even n");
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("bump eps must lie in (0, 1]");
  std::vector<double> probs(n);
  for (std::uint32_t i = 0; i < n; ++i)
    probs[i] = (i < n / 2 ? 1.0 + eps : 1.0 - eps) / n;
  return Distribution(std::move(probs));
}

Distribution make_heavy(std::uint32_t n, double eps) {
  if (n < 2) throw InvalidDomain("heavy-element distribution needs n >= 2");
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("heavy eps must lie in (0, 1]");
  const double top = 1.0 / n + eps / 2.0;
  if (top > 1.0) throw InvalidArgument("heavy element mass would exceed 1");
  std::vector<double> probs(n, (1.0 - top) / (n - 1));
  probs[0] = top;
  return Distribution(std::move(probs));
}

Distribution make_point_mass(std::uint32_t n, Symbol at) {
  if (n == 0) throw InvalidDomain("point mass needs n >= 1");
  if (at < 1 || at > n) throw InvalidArgument("point mass element outside [1, n]");
  std::vector<double> probs(n, 0.0);
  probs[at - 1] = 1.0;
  return Distribution(std::move(probs));
}

double collision_probability(const Distribution& p) {
  double mu = 0.0;
  for (double x : p.probs()) mu += x * x;
  return mu;
}

double three_way_collision_probability(const Distribution& p) {
  double gamma = 0.0;
  for (double x : p.probs()) gamma += x * x * x;
  return gamma;
}

double l1_distance(const Distribution& p, const Distribution& q) {
  if (p.n() != q.n()) throw InvalidArgument("l1_distance: domain sizes differ");
  double d = 0.0;
  for (std::uint32_t i = 0; i < p.n(); ++i) d += std::abs(p.probs()[i] - q.probs()[i]);
  return d;
}

double distance_to_uniform(const Distribution& p) {
  const double u = 1.0 / p.n();
  double d = 0.0;
  for (double x : p.probs()) d += std::abs(x - u);
  return d;
}

SampleLabeling sample_labeling(const Distribution& p, std::uint64_t vertex_count,
                               const StreamId& stream) {
  SampleLabeling out{{}, stream};
  out.values.resize(vertex_count);
  auto engine = make_engine(stream);
  for (auto& v : out.values) v = p.draw(engine);
  return out;
}

void apply_filter(SampleLabeling& labeling, const SampleFilter& filter) {
  if (!filter) return;
  for (auto& v : labeling.values) v = filter(v);
}

}  // namespace cbt
