#include "wifidist/select.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "wifidist/learners.hpp"
#include "wifidist/pairing.hpp"
#include "wifidist/rng.hpp"

namespace wifidist {

namespace {

constexpr std::size_t kTopHalf = (kFeatureCount + 1) / 2;  // 7 of 14
constexpr int kVoteCartDepth = 10;
constexpr int kVoteCartMinLeaf = 5;
constexpr double kL1LambdaFraction = 0.01;  // of lambda_max
constexpr std::size_t kRfeSurvivors = 7;

// Top-half vote: features ranked by (score desc, index asc); a vote
// additionally requires a strictly positive score, so constant columns
// never get in.
std::array<bool, kFeatureCount> top_half_votes(
    const std::array<double, kFeatureCount>& score) {
  std::array<std::size_t, kFeatureCount> order{};
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return score[a] > score[b] || (score[a] == score[b] && a < b);
  });
  std::array<bool, kFeatureCount> votes{};
  for (std::size_t r = 0; r < kTopHalf; ++r)
    votes[order[r]] = score[order[r]] > 0.0;
  return votes;
}

// Chi-square statistic of the decile-binned feature against the binary
// class. Bin edges are the 10%..90% nearest-rank quantiles, deduplicated.
double chi_square_score(const Matrix& x, std::size_t j,
                        const std::vector<bool>& positive) {
  const std::size_t n = x.rows;
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = x.at(i, j);
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> edges;
  for (int q = 1; q <= 9; ++q) {
    const double f = static_cast<double>(q) / 10.0;
    const auto idx =
        static_cast<std::size_t>(std::floor(f * static_cast<double>(n - 1)));
    const double e = sorted[idx];
    if (edges.empty() || e > edges.back()) edges.push_back(e);
  }
  const std::size_t bins = edges.size() + 1;
  if (bins < 2) return 0.0;  // constant column

  // counts[bin][class]; bin = number of edges strictly below the value.
  std::vector<std::array<double, 2>> counts(bins, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t bin = static_cast<std::size_t>(
        std::upper_bound(edges.begin(), edges.end(), values[i]) -
        edges.begin());
    counts[bin][positive[i] ? 1 : 0] += 1.0;
  }
  double class_total[2] = {0.0, 0.0};
  for (const auto& row : counts) {
    class_total[0] += row[0];
    class_total[1] += row[1];
  }
  double chi2 = 0.0;
  for (const auto& row : counts) {
    const double row_total = row[0] + row[1];
    for (int c = 0; c < 2; ++c) {
      const double expected =
          row_total * class_total[c] / static_cast<double>(n);
      if (expected > 0.0) {
        const double d = row[c] - expected;
        chi2 += d * d / expected;
      }
    }
  }
  return chi2;
}

// Lasso by cyclic coordinate descent on standardized columns, centered
// target. Returns the coefficient vector.
std::vector<double> lasso_coefficients(const Matrix& xs,
                                       const std::vector<double>& yc,
                                       double lambda) {
  const std::size_t n = xs.rows, d = xs.cols;
  std::vector<double> w(d, 0.0);
  std::vector<double> residual = yc;
  // Column scale z_j = (1/n) X_j . X_j; zero for constant columns.
  std::vector<double> z(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += xs.at(i, j) * xs.at(i, j);
    z[j] = s / static_cast<double>(n);
  }
  for (int sweep = 0; sweep < 1000; ++sweep) {
    double max_delta = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (z[j] == 0.0) continue;
      double rho = 0.0;
      for (std::size_t i = 0; i < n; ++i) rho += xs.at(i, j) * residual[i];
      rho = rho / static_cast<double>(n) + z[j] * w[j];
      double wj = 0.0;
      if (rho > lambda)
        wj = (rho - lambda) / z[j];
      else if (rho < -lambda)
        wj = (rho + lambda) / z[j];
      const double delta = wj - w[j];
      if (delta != 0.0) {
        for (std::size_t i = 0; i < n; ++i)
          residual[i] -= delta * xs.at(i, j);
        w[j] = wj;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    if (max_delta < 1e-8) break;
  }
  return w;
}

}  // namespace

VoteTable importance_votes(const std::vector<PairRecord>& train_pairs,
                           const EvalConfig& eval_cfg) {
  if (train_pairs.empty())
    throw EmptyDataset("importance voting needs training pairs");
  const std::size_t n = train_pairs.size();
  const Matrix x = apply_mask(train_pairs, FeatureMask::all_on());
  const std::vector<double> y = labels(train_pairs);

  std::vector<bool> positive(n);
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    positive[i] = y[i] < eval_cfg.proximity_threshold_m;
    n_pos += positive[i] ? 1 : 0;
  }
  if (n_pos == 0 || n_pos == n)
    throw DegenerateLabels(
        "proximity classes collapsed; cannot score chi-square votes");

  VoteTable table;

  // 1. chi-square on binned features vs class.
  std::array<double, kFeatureCount> chi2{};
  for (std::size_t j = 0; j < kFeatureCount; ++j)
    chi2[j] = chi_square_score(x, j, positive);
  const auto chi_votes = top_half_votes(chi2);

  // 2. regression-tree impurity importance on the continuous label.
  const CartModel tree = fit_cart(x, y, kVoteCartDepth, kVoteCartMinLeaf);
  const std::vector<double> imp = cart_feature_importance(tree, kFeatureCount);
  std::array<double, kFeatureCount> imp_arr{};
  std::copy(imp.begin(), imp.end(), imp_arr.begin());
  const auto cart_votes = top_half_votes(imp_arr);

  // 3. L1 shrinkage: nonzero coefficient at lambda = 0.01 * lambda_max.
  const Standardizer std_ = Standardizer::fit(x);
  const Matrix xs = std_.transform(x);
  double ymean = 0.0;
  for (double v : y) ymean += v;
  ymean /= static_cast<double>(n);
  std::vector<double> yc(n);
  for (std::size_t i = 0; i < n; ++i) yc[i] = y[i] - ymean;
  double lambda_max = 0.0;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += xs.at(i, j) * yc[i];
    lambda_max = std::max(lambda_max, std::abs(s) / static_cast<double>(n));
  }
  std::array<bool, kFeatureCount> l1_votes{};
  if (lambda_max > 0.0) {
    const auto w = lasso_coefficients(xs, yc, kL1LambdaFraction * lambda_max);
    for (std::size_t j = 0; j < kFeatureCount; ++j)
      l1_votes[j] = std::abs(w[j]) > 1e-10;
  }

  // 4. RFE with OLS: drop the smallest standardized |coefficient| until 7
  // survive. Ties drop the higher feature index.
  std::vector<std::size_t> active(kFeatureCount);
  std::iota(active.begin(), active.end(), 0);
  std::vector<double> final_w;
  while (true) {
    Matrix xa(n, active.size());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < active.size(); ++j)
        xa.at(i, j) = x.at(i, active[j]);
    const LinearModel fit = fit_ols(xa, y);
    if (active.size() <= kRfeSurvivors) {
      final_w = fit.weights;
      break;
    }
    std::size_t drop = 0;
    for (std::size_t j = 1; j < active.size(); ++j)
      if (std::abs(fit.weights[j]) <= std::abs(fit.weights[drop])) drop = j;
    active.erase(active.begin() + static_cast<long>(drop));
  }
  std::array<bool, kFeatureCount> rfe_votes{};
  for (std::size_t j = 0; j < active.size(); ++j)
    rfe_votes[active[j]] = std::abs(final_w[j]) > 1e-12;

  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    table.votes[f] = {chi_votes[f], cart_votes[f], l1_votes[f], rfe_votes[f]};
    table.totals[f] = 0;
    for (bool v : table.votes[f]) table.totals[f] += v ? 1 : 0;
  }
  return table;
}

void export_vote_table_csv(const VoteTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << "feature";
  for (auto m : VoteTable::kMethods) out << "," << m;
  out << ",total\n";
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    out << kFeatureNames[f];
    for (std::size_t m = 0; m < VoteTable::kMethodCount; ++m)
      out << "," << (table.votes[f][m] ? 1 : 0);
    out << "," << table.totals[f] << "\n";
  }
}

// ---------------------------------------------------------------------------
// Genetic algorithm

void GAConfig::validate() const {
  if (population_size < 2) throw InvalidConfig("GA population must be >= 2");
  if (generations < 1) throw InvalidConfig("GA needs >= 1 generation");
  if (tournament_size < 1) throw InvalidConfig("tournament size must be >= 1");
  if (elitism < 0 || elitism >= population_size)
    throw InvalidConfig("elitism must be in [0, population)");
  if (crossover_rate < 0.0 || crossover_rate > 1.0 || mutation_rate < 0.0 ||
      mutation_rate > 1.0)
    throw InvalidConfig("GA rates must be in [0, 1]");
  if (!(train_filter_m > 0.0))
    throw InvalidConfig("GA train filter must be positive");
}

namespace {

using Chromosome = FeatureMask;

Chromosome random_chromosome(Rng& rng) {
  Chromosome c;
  for (std::size_t i = 0; i < kFeatureCount; ++i) c.set(i, rng.bernoulli(0.5));
  return c;
}

void repair(Chromosome& c, Rng& rng) {
  if (!c.any()) c.set(rng.index(kFeatureCount), true);
}

void mutate(Chromosome& c, double rate, Rng& rng) {
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    if (rng.bernoulli(rate)) c.set(i, !c.test(i));
}

std::pair<Chromosome, Chromosome> uniform_crossover(const Chromosome& a,
                                                    const Chromosome& b,
                                                    Rng& rng) {
  Chromosome c1, c2;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const bool from_a = rng.bernoulli(0.5);
    c1.set(i, from_a ? a.test(i) : b.test(i));
    c2.set(i, from_a ? b.test(i) : a.test(i));
  }
  return {c1, c2};
}

// Fitness context: matrices are materialized once; per-mask columns are
// gathered from them.
struct FitnessContext {
  Matrix train_x;  // n x 14, raw features of the filtered training pairs
  std::vector<double> train_y;
  Matrix val_x;
  std::vector<double> val_y;
  double threshold = 4.0;
  double beta = 0.05;
  std::map<std::uint16_t, double> cache;

  Matrix gather(const Matrix& from, const std::vector<std::size_t>& cols) const {
    Matrix out(from.rows, cols.size());
    for (std::size_t i = 0; i < from.rows; ++i)
      for (std::size_t j = 0; j < cols.size(); ++j)
        out.at(i, j) = from.at(i, cols[j]);
    return out;
  }

  double fitness(const Chromosome& mask) {
    const std::uint16_t key = mask.to_bits();
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    double f = 0.0;
    if (train_x.rows > 0 && val_x.rows > 0) {
      const auto cols = mask.indices();
      const LinearModel model = fit_ols(gather(train_x, cols), train_y);
      const std::vector<double> yhat = model.predict(gather(val_x, cols));
      const Confusion c = classify_proximity(val_y, yhat, threshold);
      f = f_beta(precision(c), recall(c), beta);
    }
    cache.emplace(key, f);
    return f;
  }
};

}  // namespace

GaResult ga_select(const std::vector<PairRecord>& train_pairs,
                   const std::vector<PairRecord>& val_pairs,
                   const GAConfig& cfg, const EvalConfig& eval_cfg) {
  cfg.validate();

  FitnessContext ctx;
  const std::vector<PairRecord> filtered =
      filter_by_label(train_pairs, cfg.train_filter_m);
  if (!filtered.empty()) {
    ctx.train_x = apply_mask(filtered, FeatureMask::all_on());
    ctx.train_y = labels(filtered);
  }
  if (!val_pairs.empty()) {
    ctx.val_x = apply_mask(val_pairs, FeatureMask::all_on());
    ctx.val_y = labels(val_pairs);
  }
  ctx.threshold = eval_cfg.proximity_threshold_m;
  ctx.beta = eval_cfg.beta;

  Rng rng(cfg.seed);
  const std::size_t pop_size = static_cast<std::size_t>(cfg.population_size);

  std::vector<Chromosome> population(pop_size);
  for (auto& c : population) {
    c = random_chromosome(rng);
    repair(c, rng);
  }

  GaResult result;
  bool have_best = false;

  std::vector<double> fitness(pop_size);
  for (int gen = 0; gen < cfg.generations; ++gen) {
    for (std::size_t i = 0; i < pop_size; ++i)
      fitness[i] = ctx.fitness(population[i]);

    double gen_best = fitness[0];
    std::size_t gen_best_idx = 0;
    for (std::size_t i = 1; i < pop_size; ++i) {
      if (fitness[i] > gen_best) {
        gen_best = fitness[i];
        gen_best_idx = i;
      }
    }
    result.history.push_back(gen_best);
    if (!have_best || gen_best > result.best_fitness) {
      have_best = true;
      result.best_fitness = gen_best;
      result.best_mask = population[gen_best_idx];
    }
    if (gen + 1 == cfg.generations) break;

    // Elites first (fitness desc, index asc), then tournament offspring.
    std::vector<std::size_t> order(pop_size);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return fitness[a] > fitness[b] || (fitness[a] == fitness[b] && a < b);
    });

    std::vector<Chromosome> next;
    next.reserve(pop_size);
    for (int e = 0; e < cfg.elitism; ++e)
      next.push_back(population[order[static_cast<std::size_t>(e)]]);

    auto tournament = [&]() -> const Chromosome& {
      std::size_t best = rng.index(pop_size);
      for (int t = 1; t < cfg.tournament_size; ++t) {
        const std::size_t cand = rng.index(pop_size);
        if (fitness[cand] > fitness[best]) best = cand;
      }
      return population[best];
    };

    while (next.size() < pop_size) {
      const Chromosome pa = tournament();
      const Chromosome pb = tournament();
      Chromosome c1 = pa, c2 = pb;
      if (rng.bernoulli(cfg.crossover_rate))
        std::tie(c1, c2) = uniform_crossover(pa, pb, rng);
      mutate(c1, cfg.mutation_rate, rng);
      repair(c1, rng);
      mutate(c2, cfg.mutation_rate, rng);
      repair(c2, rng);
      next.push_back(c1);
      if (next.size() < pop_size) next.push_back(c2);
    }
    population = std::move(next);
  }
  return result;
}

void export_fitness_history_csv(const std::vector<double>& history,
                                const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << "generation,best_f_beta\n";
  for (std::size_t g = 0; g < history.size(); ++g)
    out << g << "," << history[g] << "\n";
}

}  // namespace wifidist
