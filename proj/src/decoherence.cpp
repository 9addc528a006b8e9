#include "pqw/decoherence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>

#include "pqw/errors.hpp"
#include "pqw/szegedy_core.hpp"
#include "pqw/text_io.hpp"
#include "parallel.hpp"

namespace pqw {

namespace {

// Fixed-shape pairwise summation: the k-th pushed term always lands in the
// same position of the binary tree, so results depend only on the order of
// pushes, not on how the terms were produced.
class PairwiseSum {
 public:
  void push(Matrix term) {
    std::size_t level = 0;
    while (level < levels_.size() && levels_[level].has_value()) {
      term = *levels_[level] + term;
      levels_[level].reset();
      ++level;
    }
    if (level == levels_.size()) levels_.emplace_back();
    levels_[level] = std::move(term);
  }

  Matrix result(Eigen::Index rows, Eigen::Index cols) const {
    std::optional<Matrix> total;
    for (const auto& slot : levels_) {
      if (!slot) continue;
      total = total ? Matrix(*slot + *total) : *slot;
    }
    return total ? *total : Matrix::Zero(rows, cols);
  }

 private:
  std::vector<std::optional<Matrix>> levels_;
};

using detail::parallel_for;
using detail::resolve_workers;

using FlipKey = std::vector<std::uint64_t>;

FlipKey pack(const std::vector<bool>& flips) {
  FlipKey key((flips.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < flips.size(); ++i) {
    if (flips[i]) key[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  return key;
}

std::vector<bool> unpack(const FlipKey& key, std::size_t slots) {
  std::vector<bool> flips(slots, false);
  for (std::size_t i = 0; i < slots; ++i) flips[i] = (key[i / 64] >> (i % 64)) & 1u;
  return flips;
}

void require_matching(const PercolationModel& model, const MarkedSet& marked) {
  if (marked.n() != model.base().n()) {
    throw ValidationError("marked set size does not match the base graph");
  }
}

}  // namespace

std::string to_string(Variant v) {
  return v == Variant::bond_flip ? "bond-flip" : "removal";
}

Variant parse_variant(std::string_view text) {
  if (text == "bond-flip" || text == "bond_flip") return Variant::bond_flip;
  if (text == "removal" || text == "removal-only" || text == "removal_only") {
    return Variant::removal_only;
  }
  throw ParseError("unknown percolation variant '" + std::string(text) + "'");
}

std::string to_string(AveragedOperator::Mode mode) {
  return mode == AveragedOperator::Mode::exact ? "exact" : "mc";
}

PercolationModel::PercolationModel(Graph base, double p, Variant variant)
    : base_(std::move(base)), p_(p), variant_(variant) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("percolation probability must lie in [0,1]");
  const int n = base_.n();
  if (variant_ == Variant::bond_flip) {
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        slots_.push_back({u, v});
        slot_in_base_.push_back(base_.has_edge(u, v));
      }
    }
  } else {
    slots_ = base_.edges();
    slot_in_base_.assign(slots_.size(), true);
  }
}

Graph PercolationModel::apply_flips(const std::vector<bool>& flips) const {
  std::vector<Edge> edges;
  if (variant_ == Variant::removal_only) {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (!flips[i]) edges.push_back(slots_[i]);
    }
  } else {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (slot_in_base_[i] != flips[i]) edges.push_back(slots_[i]);
    }
  }
  return Graph(base_.n(), std::move(edges));
}

Graph PercolationModel::candidate(std::uint64_t mask) const {
  if (slots_.size() >= 64) throw BudgetError("mask addressing needs a_c < 64");
  std::vector<bool> flips(slots_.size());
  for (std::size_t i = 0; i < slots_.size(); ++i) flips[i] = (mask >> i) & 1u;
  return apply_flips(flips);
}

double PercolationModel::weight(int altered) const {
  // std::pow(0.0, 0) == 1 gives the point masses at p = 0 and p = 1.
  return std::pow(1.0 - p_, a_c() - altered) * std::pow(p_, altered);
}

std::vector<bool> sample_flips(const PercolationModel& model, CounterRng& rng) {
  std::vector<bool> flips(static_cast<std::size_t>(model.a_c()));
  for (std::size_t i = 0; i < flips.size(); ++i) flips[i] = rng.bernoulli(model.p());
  return flips;
}

Graph sample_percolated_graph(const PercolationModel& model, CounterRng& rng) {
  return model.apply_flips(sample_flips(model, rng));
}

double occurrence_probability(const PercolationModel& model, const Graph& candidate) {
  const Graph& base = model.base();
  if (candidate.n() != base.n()) throw ValidationError("candidate has a different vertex count");
  int altered = 0;
  if (model.variant() == Variant::bond_flip) {
    for (const auto& e : model.slots()) {
      if (base.has_edge(e.u, e.v) != candidate.has_edge(e.u, e.v)) ++altered;
    }
  } else {
    for (const auto& e : candidate.edges()) {
      if (!base.has_edge(e.u, e.v)) {
        throw ValidationError("removal-only candidate is not a subgraph of the base graph");
      }
    }
    altered = static_cast<int>(base.edge_count() - candidate.edge_count());
  }
  return model.weight(altered);
}

Matrix marked_walk_unitary(const Graph& g, const MarkedSet& marked) {
  return walk_unitary(apply_marking(build_transition_matrix(g), marked));
}

std::vector<WeightedCandidate> enumerate_candidates(const PercolationModel& model,
                                                    std::uint64_t cap) {
  const int a_c = model.a_c();
  std::vector<WeightedCandidate> out;
  if (model.p() == 0.0 || model.p() == 1.0) {
    if (a_c >= 64) throw BudgetError("point-mass enumeration needs a_c < 64");
    const std::uint64_t all = a_c == 0 ? 0 : (~std::uint64_t{0} >> (64 - a_c));
    out.push_back({model.p() == 0.0 ? 0 : all, 1.0});
    return out;
  }
  if (a_c >= 63 || (std::uint64_t{1} << a_c) > cap) {
    throw BudgetError("exact enumeration needs 2^" + std::to_string(a_c) +
                      " candidate graphs, above the cap of " + std::to_string(cap) +
                      "; use Monte Carlo mode");
  }
  const std::uint64_t count = std::uint64_t{1} << a_c;
  out.reserve(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    out.push_back({mask, model.weight(std::popcount(mask))});
  }
  return out;
}

AveragedOperator build_averaged_operator_exact(const PercolationModel& model,
                                               const MarkedSet& marked, std::uint64_t cap) {
  require_matching(model, marked);
  AveragedOperator op;
  op.mode = AveragedOperator::Mode::exact;
  op.marked = marked;
  op.p = model.p();
  op.variant = model.variant();
  op.a_c = model.a_c();

  // Point masses need no enumeration, whatever a_c is.
  if (model.p() == 0.0 || model.p() == 1.0) {
    const std::vector<bool> flips(static_cast<std::size_t>(model.a_c()), model.p() == 1.0);
    op.matrix = marked_walk_unitary(model.apply_flips(flips), marked);
    op.weight_sum = 1.0;
    op.distinct_graphs = 1;
    return op;
  }

  const auto candidates = enumerate_candidates(model, cap);
  const int n = model.base().n();
  const Eigen::Index dim = static_cast<Eigen::Index>(n) * n;
  PairwiseSum sum;
  double weight_sum = 0.0;
  for (const auto& c : candidates) {
    weight_sum += c.weight;
    sum.push(c.weight * marked_walk_unitary(model.candidate(c.mask), marked));
  }
  op.matrix = sum.result(dim, dim);
  op.weight_sum = weight_sum;
  op.distinct_graphs = candidates.size();
  return op;
}

AveragedOperator build_averaged_operator_mc(const PercolationModel& model,
                                            const MarkedSet& marked, std::uint64_t samples,
                                            std::uint64_t seed,
                                            const MonteCarloOptions& options) {
  require_matching(model, marked);
  if (samples < 1) throw ValidationError("Monte Carlo mode needs at least one sample");
  const unsigned workers = resolve_workers(options.workers);
  const int n = model.base().n();
  const Eigen::Index dim = static_cast<Eigen::Index>(n) * n;

  // Sample i draws from stream (seed, i). Identical graphs are tallied so
  // each distinct operator is built once; the mean is sum(count * U) / N.
  std::vector<std::map<FlipKey, std::uint64_t>> partial(workers);
  const std::uint64_t chunk = (samples + workers - 1) / workers;
  parallel_for(workers, workers, [&](std::size_t w) {
    const std::uint64_t begin = w * chunk;
    const std::uint64_t end = std::min<std::uint64_t>(samples, begin + chunk);
    for (std::uint64_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i);
      ++partial[w][pack(sample_flips(model, rng))];
    }
  });
  std::map<FlipKey, std::uint64_t> tally;
  for (auto& part : partial) {
    for (auto& [key, count] : part) tally[key] += count;
  }
  std::vector<std::pair<FlipKey, std::uint64_t>> items(tally.begin(), tally.end());

  const auto slots = static_cast<std::size_t>(model.a_c());
  auto build = [&](std::size_t i) {
    return marked_walk_unitary(model.apply_flips(unpack(items[i].first, slots)), marked);
  };

  const double inv_n = 1.0 / static_cast<double>(samples);
  PairwiseSum sum;
  std::vector<Matrix> wave;
  for (std::size_t start = 0; start < items.size(); start += workers) {
    const std::size_t len = std::min<std::size_t>(workers, items.size() - start);
    wave.assign(len, Matrix());
    parallel_for(len, workers, [&](std::size_t j) { wave[j] = build(start + j); });
    for (std::size_t j = 0; j < len; ++j) {
      sum.push((static_cast<double>(items[start + j].second) * inv_n) * wave[j]);
    }
  }

  AveragedOperator op;
  op.matrix = sum.result(dim, dim);
  op.mode = AveragedOperator::Mode::monte_carlo;
  op.samples = samples;
  op.seed = seed;
  op.marked = marked;
  op.p = model.p();
  op.variant = model.variant();
  op.a_c = model.a_c();
  op.weight_sum = 1.0;
  op.distinct_graphs = items.size();

  if (options.std_error) {
    PairwiseSum sq;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const Matrix diff = build(i) - op.matrix;
      sq.push(static_cast<double>(items[i].second) * diff.cwiseProduct(diff));
    }
    Matrix se = Matrix::Zero(dim, dim);
    if (samples > 1) {
      const double nn = static_cast<double>(samples);
      se = (sq.result(dim, dim) / ((nn - 1.0) * nn)).cwiseSqrt();
    }
    op.std_error = std::move(se);
  }
  return op;
}

double verify_lemma1(const PercolationModel& model, const MarkedSet& marked, int t, int T,
                     std::uint64_t budget) {
  require_matching(model, marked);
  if (t < 0 || t > T) throw ValidationError("sequence check needs 0 <= t <= T");
  const auto candidates = enumerate_candidates(model, budget);
  const double count = static_cast<double>(candidates.size());
  if (std::pow(count, T) > static_cast<double>(budget)) {
    throw BudgetError("sequence enumeration exceeds the budget of " + std::to_string(budget));
  }
  std::vector<Matrix> ops;
  ops.reserve(candidates.size());
  for (const auto& c : candidates) ops.push_back(marked_walk_unitary(model.candidate(c.mask), marked));

  const int n = model.base().n();
  const Eigen::Index dim = static_cast<Eigen::Index>(n) * n;
  Matrix lhs = Matrix::Zero(dim, dim);

  // Depth-first over (P_1, ..., P_T); only the first t factors act.
  std::function<void(int, double, const Matrix&)> visit = [&](int depth, double prob,
                                                               const Matrix& product) {
    if (depth == T) {
      lhs += prob * product;
      return;
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const double w = prob * candidates[i].weight;
      if (depth < t) {
        visit(depth + 1, w, ops[i] * product);
      } else {
        visit(depth + 1, w, product);
      }
    }
  };
  visit(0, 1.0, Matrix::Identity(dim, dim));

  const Matrix ubar = build_averaged_operator_exact(model, marked, budget).matrix;
  Matrix power = Matrix::Identity(dim, dim);
  for (int i = 0; i < t; ++i) power = ubar * power;
  return (lhs - power).cwiseAbs().maxCoeff();
}

nlohmann::json provenance_json(const AveragedOperator& op) {
  nlohmann::json j = {{"mode", to_string(op.mode)},
                      {"p", op.p},
                      {"variant", to_string(op.variant)},
                      {"a_c", op.a_c},
                      {"marked", op.marked.members()},
                      {"dimension", op.matrix.rows()},
                      {"weight_sum", op.weight_sum},
                      {"distinct_graphs", op.distinct_graphs}};
  if (op.mode == AveragedOperator::Mode::monte_carlo) {
    j["samples"] = op.samples;
    j["seed"] = op.seed;
  } else {
    j["samples"] = nullptr;
    j["seed"] = nullptr;
  }
  return j;
}

void write_averaged_operator(const std::filesystem::path& stem, const AveragedOperator& op,
                             MatrixFormat format) {
  auto header = provenance_json(op);
  header["layout"] = "row-major, index (x,y) -> x*n + y";
  auto data_path = stem;
  if (format == MatrixFormat::binary) {
    data_path += ".bin";
    header["format"] = "float64-le";
    write_matrix_binary(data_path, op.matrix);
  } else {
    data_path += ".csv";
    header["format"] = "csv";
    write_text_file(data_path, matrix_to_csv(op.matrix));
  }
  header["data_file"] = data_path.filename().string();
  auto header_path = stem;
  header_path += ".json";
  write_text_file(header_path, header.dump(2) + "\n");
}

}  // namespace pqw
