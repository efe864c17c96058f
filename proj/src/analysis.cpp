#include "isingevo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "isingevo/criticality.hpp"
#include "isingevo/parallel.hpp"
#include "isingevo/stats.hpp"

namespace isingevo {

double gamma_t(double energy_train, std::size_t t_train, double energy_extend,
               std::size_t t_extend) {
  if (t_train == 0 || t_extend == 0) throw std::invalid_argument("horizons must be positive");
  if (energy_train == 0.0) throw std::invalid_argument("training energy is zero");
  return (energy_extend / static_cast<double>(t_extend)) /
         (energy_train / static_cast<double>(t_train));
}

double gamma_from_trace(std::span<const double> trace, std::size_t t_train, std::size_t t_extend) {
  if (t_train == 0 || t_extend == 0 || t_train > trace.size() || t_extend > trace.size()) {
    throw std::invalid_argument("horizon outside the trace");
  }
  return gamma_t(trace[t_train - 1], t_train, trace[t_extend - 1], t_extend);
}

GeneralizabilityResult generalizability(std::span<const IsingGenome> population,
                                        const WorldConfig& world, std::size_t t_train,
                                        std::size_t t_extend, const SeedTree& seeds) {
  if (population.empty()) throw std::invalid_argument("generalizability needs a population");
  GeneralizabilityResult out;
  out.t_train = t_train;
  out.t_extend = t_extend;
  WorldConfig cfg = world;
  cfg.lifespan = t_train;
  out.energy_train = mean(run_lifetime(population, cfg, seeds).final_energy);
  cfg.lifespan = t_extend;
  out.energy_extend = mean(run_lifetime(population, cfg, seeds).final_energy);
  out.gamma = gamma_t(out.energy_train, t_train, out.energy_extend, t_extend);
  return out;
}

IsingGenome perturb_genome(const IsingGenome& genome, double f_pert, Rng& rng, double bound) {
  if (!(f_pert >= 0.0)) throw std::invalid_argument("f_pert must be non-negative");
  IsingGenome out = genome;
  const std::size_t n = genome.topology.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!out.edge(i, j)) continue;
      const double step = rng.bernoulli(0.5) ? f_pert : -f_pert;
      double& w = out.weights[i * n + j];
      w = std::clamp(w + step, -bound, bound);
    }
  }
  return out;
}

std::vector<double> default_perturbation_grid() {
  std::vector<double> grid{0.0};
  const auto logs = log_grid(0.01, 2.0, 12);
  grid.insert(grid.end(), logs.begin(), logs.end());
  return grid;
}

PerturbationSweep perturbation_sweep(std::span<const IsingGenome> population,
                                     const WorldConfig& world, std::span<const double> f_grid,
                                     std::size_t replicates, const SeedTree& seeds,
                                     std::size_t threads) {
  if (population.empty()) throw std::invalid_argument("perturbation sweep needs a population");
  if (replicates == 0) throw std::invalid_argument("replicates must be positive");
  PerturbationSweep out;
  out.f_pert.assign(f_grid.begin(), f_grid.end());
  out.samples.resize(f_grid.size());
  std::vector<std::vector<double>> per_job(f_grid.size() * replicates);
  parallel_for(per_job.size(), threads, [&](std::size_t job) {
    const std::size_t k = job / replicates;
    const std::size_t r = job % replicates;
    const SeedTree s = seeds.path(k, r);
    Rng rng = s.child(stream::kPerturb).rng();
    std::vector<IsingGenome> perturbed;
    perturbed.reserve(population.size());
    for (const auto& g : population) perturbed.push_back(perturb_genome(g, f_grid[k], rng));
    per_job[job] = run_lifetime(perturbed, world, s.child(stream::kLifetime)).fitness;
  });
  for (std::size_t job = 0; job < per_job.size(); ++job) {
    auto& dst = out.samples[job / replicates];
    dst.insert(dst.end(), per_job[job].begin(), per_job[job].end());
  }
  for (const auto& s : out.samples) out.mean_fitness.push_back(mean(s));
  return out;
}

DecayFit decay_exponent(std::span<const double> f_pert, std::span<const double> mean_fitness,
                        double baseline) {
  if (f_pert.size() != mean_fitness.size()) {
    throw std::invalid_argument("f_pert and fitness lengths differ");
  }
  DecayFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k = 0; k < f_pert.size(); ++k) {
    const double shifted = mean_fitness[k] - baseline;
    if (!(shifted > 0.0)) {
      fit.excluded.push_back(k);
      continue;
    }
    xs.push_back(f_pert[k]);
    ys.push_back(std::log(shifted));
  }
  if (xs.size() < 4) {
    throw std::invalid_argument(
        fmt::format("decay fit needs four usable points, have {}", xs.size()));
  }
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("decay fit needs distinct magnitudes");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

namespace {

int histogram_slot(LineageTag tag) {
  switch (tag) {
    case LineageTag::Copy: return 0;
    case LineageTag::Mutate: return 1;
    case LineageTag::Mate: return 2;
    default: return -1;
  }
}

}  // namespace

std::span<const std::size_t> OperatorHistogram::of(LineageTag tag) const {
  const int slot = histogram_slot(tag);
  if (slot < 0) throw std::invalid_argument("histograms exist only for copy, mutate and mate");
  return counts[static_cast<std::size_t>(slot)];
}

OperatorHistogram operator_histogram(std::span<const LineageRecord> records, std::size_t first,
                                     std::size_t last, std::size_t bins) {
  if (records.empty()) throw std::invalid_argument("no lineage records");
  if (bins == 0) throw std::invalid_argument("bins must be positive");
  std::size_t lo = records.front().generation;
  std::size_t hi = lo;
  for (const auto& r : records) {
    lo = std::min(lo, r.generation);
    hi = std::max(hi, r.generation);
  }
  if (first > last || first < lo || last > hi) {
    throw std::out_of_range(fmt::format("window [{}, {}] outside logged generations [{}, {}]",
                                        first, last, lo, hi));
  }
  double fmin = std::numeric_limits<double>::infinity();
  double fmax = -fmin;
  for (const auto& r : records) {
    if (r.generation < first || r.generation > last) continue;
    fmin = std::min(fmin, r.fitness);
    fmax = std::max(fmax, r.fitness);
  }
  OperatorHistogram h;
  if (fmax == fmin) fmax = fmin + 1.0;
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    h.edges[b] = fmin + (fmax - fmin) * static_cast<double>(b) / static_cast<double>(bins);
  }
  for (auto& c : h.counts) c.assign(bins, 0);
  for (const auto& r : records) {
    if (r.generation < first || r.generation > last) continue;
    const int slot = histogram_slot(r.lineage);
    if (slot < 0) continue;
    auto b = static_cast<std::size_t>((r.fitness - fmin) / (fmax - fmin) *
                                      static_cast<double>(bins));
    b = std::min(b, bins - 1);
    ++h.counts[static_cast<std::size_t>(slot)][b];
  }
  return h;
}

LineageCounts count_lineage(std::span<const LineageTag> tags) {
  LineageCounts c;
  for (auto t : tags) {
    switch (t) {
      case LineageTag::Copy: ++c.copy; break;
      case LineageTag::Mutate: ++c.mutate; break;
      case LineageTag::Mate: ++c.mate; break;
      default: ++c.other; break;
    }
  }
  return c;
}

namespace {

// Midranks of the pooled sample, doubled so that they are integers.
std::vector<long> doubled_midranks(const std::vector<double>& pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto x, auto y) { return pooled[x] < pooled[y]; });
  std::vector<long> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[idx[j + 1]] == pooled[idx[i]]) ++j;
    const long twice = static_cast<long>(i + j) + 2;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = twice;
    i = j + 1;
  }
  return ranks;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 Alternative alternative) {
  if (a.empty() || b.empty()) throw std::invalid_argument("Mann-Whitney needs non-empty samples");
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t n = na + nb;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = doubled_midranks(pooled);

  long rank_sum_a = 0;
  for (std::size_t i = 0; i < na; ++i) rank_sum_a += ranks[i];
  const long offset = static_cast<long>(na * (na + 1));
  MannWhitneyResult res;
  res.u = 0.5 * static_cast<double>(rank_sum_a - offset);

  if (std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled.front(); })) {
    res.p = 0.5;
    res.exact = na * nb <= 200;
    return res;
  }

  if (na * nb <= 200) {
    res.exact = true;
    // ways[k][s]: number of k-subsets of the ranks seen so far whose doubled
    // rank sum is s.
    const long max_sum = std::accumulate(ranks.begin(), ranks.end(), 0L);
    std::vector<std::vector<double>> ways(na + 1, std::vector<double>(max_sum + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const long r = ranks[i];
      for (std::size_t k = std::min(i + 1, na); k >= 1; --k) {
        for (long s = max_sum; s >= r; --s) ways[k][s] += ways[k - 1][s - r];
      }
    }
    double total = 0.0;
    double tail = 0.0;
    for (long s = 0; s <= max_sum; ++s) {
      const double w = ways[na][s];
      total += w;
      const bool in_tail = alternative == Alternative::Greater ? s >= rank_sum_a : s <= rank_sum_a;
      if (in_tail) tail += w;
    }
    res.p = tail / total;
    return res;
  }

  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double dn = static_cast<double>(n);
  const double prod = static_cast<double>(na) * static_cast<double>(nb);
  const double mu = 0.5 * prod;
  const double sd = std::sqrt(prod / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0))));
  if (alternative == Alternative::Greater) {
    res.p = 1.0 - normal_cdf((res.u - mu - 0.5) / sd);
  } else {
    res.p = normal_cdf((res.u - mu + 0.5) / sd);
  }
  return res;
}

double top_k_mean(std::span<const double> fitness, std::span<const double> values, std::size_t k) {
  if (fitness.size() != values.size()) throw std::invalid_argument("fitness and values differ");
  if (k == 0 || fitness.size() < k) {
    throw std::invalid_argument(
        fmt::format("need at least {} agents for the top-k mean, have {}", k, fitness.size()));
  }
  const auto order = descending_order(fitness);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += values[order[i]];
  return sum / static_cast<double>(k);
}

}  // namespace isingevo
