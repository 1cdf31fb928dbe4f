#include "tempering/paths.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "tempering/error.hpp"

namespace tempering {

namespace {

void append_swap(int i, int j, std::vector<Move>& out) {
  if (j - i <= 1) {
    out.push_back(Move::adj_swap(j));
    return;
  }
  const int mid = (i + j) / 2;
  append_swap(i, mid, out);
  append_swap(mid, j, out);
  append_swap(i, mid, out);
}

int hamming(const ProductAssignment& a, const ProductAssignment& b) {
  int d = 0;
  for (size_t j = 0; j < a.size(); ++j) d += a[j] != b[j];
  return d;
}

}  // namespace

std::vector<Move> swap_sequence(int i, int j) {
  require(i >= 0 && i < j, "swap_sequence needs 0 <= i < j");
  std::vector<Move> out;
  append_swap(i, j, out);
  return out;
}

std::int64_t path_length_F(std::int64_t ell) {
  require(ell >= 1, "path length is defined for distances >= 1");
  require(ell <= (std::int64_t{1} << 30), "distance too large");
  if (ell == 1) return 1;
  return 2 * path_length_F(ell / 2) + path_length_F((ell + 1) / 2);
}

void apply_move(ProductAssignment& lambda, const Move& move, int num_modes) {
  const int L = static_cast<int>(lambda.size()) - 1;
  switch (move.kind) {
    case Move::Kind::kAdjSwap:
      require(move.index >= 1 && move.index <= L, "adjacent swap level out of range");
      std::swap(lambda[static_cast<size_t>(move.index) - 1], lambda[static_cast<size_t>(move.index)]);
      break;
    case Move::Kind::kSetLevel0:
      require(move.index >= 0 && move.index < num_modes, "level-0 mode out of range");
      lambda[0] = move.index;
      break;
  }
}

ProductAssignment apply_moves(const ProductAssignment& lambda, std::span<const Move> moves,
                              int num_modes) {
  ProductAssignment out = lambda;
  for (const Move& m : moves) apply_move(out, m, num_modes);
  return out;
}

std::vector<ProductAssignment> path_states(const ProductAssignment& lambda,
                                           std::span<const Move> moves, int num_modes) {
  std::vector<ProductAssignment> out{lambda};
  out.reserve(moves.size() + 1);
  for (const Move& m : moves) {
    out.push_back(out.back());
    apply_move(out.back(), m, num_modes);
  }
  return out;
}

int max_divergence(const ProductAssignment& lambda, std::span<const Move> moves, int num_modes) {
  ProductAssignment cur = lambda;
  int diff = 0;
  int worst = 0;
  auto touch = [&](size_t pos, int value) {
    diff -= cur[pos] != lambda[pos];
    cur[pos] = value;
    diff += cur[pos] != lambda[pos];
  };
  for (const Move& m : moves) {
    if (m.kind == Move::Kind::kAdjSwap) {
      require(m.index >= 1 && m.index < static_cast<int>(lambda.size()),
              "adjacent swap level out of range");
      const auto a = static_cast<size_t>(m.index) - 1;
      const int va = cur[a];
      const int vb = cur[a + 1];
      touch(a, vb);
      touch(a + 1, va);
    } else {
      require(m.index >= 0 && m.index < num_modes, "level-0 mode out of range");
      touch(0, m.index);
    }
    worst = std::max(worst, diff);
  }
  return worst;
}

int divergence_D(int ell) {
  require(ell >= 1, "distance must be at least 1");
  ProductAssignment labels(static_cast<size_t>(ell) + 1);
  for (int j = 0; j <= ell; ++j) labels[static_cast<size_t>(j)] = j;
  return max_divergence(labels, swap_sequence(0, ell), ell + 1);
}

int k_star(const TemperedFamily& family) {
  const auto top = family.block_masses().row(family.L());
  int best = 0;
  for (int k = 1; k < family.num_modes(); ++k) {
    if (top(k) > top(best)) best = k;
  }
  return best;
}

MoveSequence level0_path(const ProductAssignment& lambda, int level, int mode, int kstar) {
  const int L = static_cast<int>(lambda.size()) - 1;
  require(L >= 0, "assignment must be nonempty");
  require(level >= 0 && level <= L, "level out of range");
  require(mode >= 0 && kstar >= 0, "mode out of range");
  MoveSequence seq{lambda, {}};
  if (level == 0) {
    seq.moves.push_back(Move::set_level0(mode));
    return seq;
  }
  const auto swaps = swap_sequence(0, level);
  seq.moves.push_back(Move::set_level0(kstar));
  seq.moves.insert(seq.moves.end(), swaps.begin(), swaps.end());
  seq.moves.push_back(Move::set_level0(mode));
  seq.moves.insert(seq.moves.end(), swaps.begin(), swaps.end());
  seq.moves.push_back(Move::set_level0(lambda[0]));
  return seq;
}

CongestionReport congestion(const StochasticMatrix& p1, const StochasticMatrix& p2,
                            const PathGenerator& paths) {
  require(p1.size() == p2.size(), "P1 and P2 act on different state spaces");
  if ((p1.stationary() - p2.stationary()).cwiseAbs().maxCoeff() > kStochasticTolerance) {
    throw ContractError("P1 and P2 must share their stationary distribution");
  }
  CongestionReport report;
  std::set<std::pair<Index, Index>> covered;
  paths([&](const StatePath& path) {
    require(path.states.size() >= 2, "a path needs at least one step");
    const Index x = path.states.front();
    const Index y = path.states.back();
    const double q2 = x == y ? 0.0 : p2(x, y);
    if (q2 <= 0.0) {
      throw ContractError("path endpoints (" + std::to_string(x) + ", " + std::to_string(y) +
                          ") are not a P2 edge");
    }
    if (!covered.emplace(x, y).second) {
      throw ContractError("two paths share the P2 edge (" + std::to_string(x) + ", " +
                          std::to_string(y) + ")");
    }
    const double weight =
        static_cast<double>(path.states.size() - 1) * p2.stationary()(x) * q2;
    for (size_t s = 1; s < path.states.size(); ++s) {
      const Index a = path.states[s - 1];
      const Index b = path.states[s];
      if (a == b) continue;
      if (p1(a, b) <= 0.0) {
        throw ContractError("step " + std::to_string(s) + " (" + std::to_string(a) + " -> " +
                            std::to_string(b) + ") is not an edge of P1");
      }
      report.per_edge_loads[{a, b}] += weight;
    }
    ++report.num_paths;
  });
  Index p2_edges = 0;
  const SparseMatrix& e2 = p2.entries();
  for (Index x = 0; x < e2.outerSize(); ++x) {
    for (SparseMatrix::InnerIterator it(e2, x); it; ++it) p2_edges += it.col() != x && it.value() > 0.0;
  }
  if (p2_edges != static_cast<Index>(covered.size())) {
    throw ContractError("path family covers " + std::to_string(covered.size()) + " of " +
                        std::to_string(p2_edges) + " P2 edges");
  }
  for (const auto& [edge, load] : report.per_edge_loads) {
    const double c = load / (p1.stationary()(edge.first) * p1(edge.first, edge.second));
    if (c > report.c) {
      report.c = c;
      report.argmax_edge = edge;
    }
  }
  return report;
}

CongestionReport congestion(const StochasticMatrix& p1, const StochasticMatrix& p2,
                            std::span<const StatePath> paths) {
  return congestion(p1, p2, [paths](const PathVisitor& visit) {
    for (const auto& p : paths) visit(p);
  });
}

PathGenerator canonical_paths(const TemperedFamily& family, Index budget) {
  const StateCodec codec = assignment_codec(family, budget);
  const int kstar = k_star(family);
  const int m = family.num_modes();
  return [codec, kstar, m](const PathVisitor& visit) {
    StatePath path;
    for (Index s = 0; s < codec.size(); ++s) {
      const ProductAssignment lambda = codec.decode(s);
      for (int i = 0; i < static_cast<int>(lambda.size()); ++i) {
        for (int k = 0; k < m; ++k) {
          if (k == lambda[static_cast<size_t>(i)]) continue;
          const MoveSequence seq = level0_path(lambda, i, k, kstar);
          path.states.clear();
          for (const auto& tau : path_states(lambda, seq.moves, m)) {
            path.states.push_back(codec.encode(tau));
          }
          visit(path);
        }
      }
    }
  };
}

MultiplicityReport edge_multiplicity_check(int num_modes, int L, int kstar,
                                           const MultiplicityLimits& limits) {
  require(num_modes >= 1 && L >= 0, "need m >= 1 and L >= 0");
  require(kstar >= 0 && kstar < num_modes, "k* out of range");
  if (num_modes > limits.max_modes || L > limits.max_L) {
    throw BudgetError("full path enumeration is limited to m <= " +
                      std::to_string(limits.max_modes) + ", L <= " + std::to_string(limits.max_L));
  }
  const StateCodec codec = StateCodec::mixed_radix(num_modes, L + 1, "assignment");
  MultiplicityReport report;
  report.bound = num_modes;
  for (int i = 0; i <= L; ++i) {
    for (int k = 0; k < num_modes; ++k) {
      // (step, from, to) -> number of starting assignments
      std::map<std::tuple<size_t, Index, Index>, int> counts;
      for (Index s = 0; s < codec.size(); ++s) {
        const ProductAssignment lambda = codec.decode(s);
        if (lambda[static_cast<size_t>(i)] == k) continue;
        const auto seq = level0_path(lambda, i, k, kstar);
        const auto states = path_states(lambda, seq.moves, num_modes);
        ++report.paths;
        for (size_t step = 1; step < states.size(); ++step) {
          const Index a = codec.encode(states[step - 1]);
          const Index b = codec.encode(states[step]);
          if (a == b) continue;
          const int c = ++counts[{step, a, b}];
          report.max_multiplicity = std::max(report.max_multiplicity, c);
        }
      }
    }
  }
  report.passed = report.max_multiplicity <= report.bound;
  return report;
}

MassRatioReport path_mass_ratio_check(const TemperedFamily& family, double tol, Index budget) {
  const StateCodec codec = assignment_codec(family, budget);
  const VectorXd pib = pi_bar(family, budget);
  const double B = bottleneck_ratio(family);
  const int m = family.num_modes();
  const int kstar = k_star(family);
  MassRatioReport report;
  report.worst_ratio = std::numeric_limits<double>::infinity();
  for (Index s = 0; s < codec.size(); ++s) {
    const ProductAssignment lambda = codec.decode(s);
    for (int i = 0; i <= family.L(); ++i) {
      for (int k = 0; k < m; ++k) {
        if (k == lambda[static_cast<size_t>(i)]) continue;
        const auto seq = level0_path(lambda, i, k, kstar);
        const auto states = path_states(lambda, seq.moves, m);
        const double endpoint_min = std::min(pib(s), pib(codec.encode(states.back())));
        for (const auto& tau : states) {
          const int d = hamming(tau, lambda);
          const double bound = std::pow(B, d) / m * endpoint_min;
          report.worst_ratio = std::min(report.worst_ratio, pib(codec.encode(tau)) / bound);
          ++report.states_checked;
        }
      }
    }
  }
  report.passed = report.worst_ratio >= 1.0 - tol;
  return report;
}

}  // namespace tempering
