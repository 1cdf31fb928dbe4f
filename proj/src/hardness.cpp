#include "tempering/hardness.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <set>

#include "tempering/error.hpp"

namespace tempering {

namespace {

int floor_log2(int x) {
  int r = -1;
  while (x > 0) {
    x >>= 1;
    ++r;
  }
  return r;
}

int hamming(const ProductAssignment& a, const ProductAssignment& b) {
  int d = 0;
  for (size_t j = 0; j < a.size(); ++j) d += a[j] != b[j];
  return d;
}

ProductAssignment identity_assignment(int L) {
  ProductAssignment lambda(static_cast<size_t>(L) + 1);
  for (int i = 0; i <= L; ++i) lambda[static_cast<size_t>(i)] = i;
  return lambda;
}

Rational assignment_mass(const RationalMatrix& masses, const ProductAssignment& tau) {
  Rational p(1);
  for (size_t i = 0; i < tau.size(); ++i) p *= masses(static_cast<Index>(i), tau[i]);
  return p;
}

}  // namespace

HardInstance build_hard_instance(int L) {
  require(L >= 1, "the hard instance needs L >= 1");
  require(L <= 14, "the hard instance is limited to L <= 14");
  HardInstance inst;
  inst.L = L;
  inst.m = L + 1;
  inst.gamma = mpz_class(L + 1) * (L + 1) * (L + 1);
  for (long k = 1; k <= inst.m; ++k) {
    inst.w.push_back(rational_pow(inst.gamma, 2 * k));
    inst.V.push_back(rational_pow(inst.gamma, -k * k + 1));
  }
  for (long r = 0; r <= L; ++r) {
    inst.w_r.push_back(rational_pow(inst.gamma, 2 * r + 1));
    inst.V_r.push_back(rational_pow(inst.gamma, -r * r - r));
  }
  inst.mode_masses.resize(L + 1, inst.m);
  for (long i = 0; i <= L; ++i) {
    // (w V)^{i+1} per block; the shared sum over r is the same for every k.
    Rational shared(0);
    for (long r = 0; r <= L; ++r) {
      shared += rational_pow(inst.gamma, (2 * r + 1) * (i + 1) - r * r - r);
    }
    Rational Z(0);
    for (long k = 1; k <= inst.m; ++k) {
      const Rational unnormalized =
          rational_pow(inst.gamma, 2 * (i + 1) * k - k * k + 1) + shared;
      inst.mode_masses(i, k - 1) = unnormalized;
      Z += unnormalized;
    }
    for (long k = 0; k < inst.m; ++k) {
      inst.mode_masses(i, k) /= Z;
      inst.mode_masses(i, k).canonicalize();
    }
  }
  return inst;
}

ModeMassReport verify_mode_mass_bounds(const HardInstance& inst) {
  const Rational n1(inst.L + 1);
  const Rational dominant_lower = Rational(1) - Rational(1) / n1;
  const Rational lower = Rational(1) / (2 * n1 * n1 * n1);
  const Rational upper = Rational(1) / (n1 * n1);
  ModeMassReport report;
  report.passed = true;
  bool first = true;
  for (int i = 0; i <= inst.L; ++i) {
    for (int k = 0; k < inst.m; ++k) {
      MassCellCheck cell;
      cell.level = i;
      cell.mode = k;
      cell.dominant = k == i;
      cell.value = inst.mode_masses(i, k);
      Rational margin;
      if (cell.dominant) {
        cell.lower_margin = cell.value - dominant_lower;
        margin = cell.lower_margin;
      } else {
        cell.lower_margin = cell.value - lower;
        cell.upper_margin = upper - cell.value;
        margin = std::min(cell.lower_margin, *cell.upper_margin);
      }
      cell.passed = margin > 0;
      report.passed = report.passed && cell.passed;
      if (first || margin < report.min_margin) report.min_margin = margin;
      first = false;
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

BottleneckReport verify_bottleneck_bound(const HardInstance& inst) {
  BottleneckReport report;
  report.B = bottleneck_ratio(inst.mode_masses);
  Rational n7(1);
  for (int j = 0; j < 7; ++j) n7 *= inst.L + 1;
  report.bound = Rational(1) / n7;
  report.margin = report.B - report.bound;
  report.ratio = to_double(Rational(report.B / report.bound));
  report.passed = report.B > report.bound;
  return report;
}

ConstrainedChain constrained_projected_chain(const HardInstance& inst, int max_L) {
  require(inst.L >= 1, "constrained chain needs L >= 1");
  if (inst.L > max_L) {
    throw BudgetError("constrained chain has (L+1)! states; limited to L <= " +
                      std::to_string(max_L));
  }
  const int L = inst.L;
  const RationalMatrix& M = inst.mode_masses;

  // Breadth-first over adjacent swaps from lambda: the reachable set.
  std::vector<ProductAssignment> states{identity_assignment(L)};
  std::map<ProductAssignment, Index> index{{states[0], 0}};
  for (size_t head = 0; head < states.size(); ++head) {
    for (int i = 1; i <= L; ++i) {
      ProductAssignment next = states[head];
      std::swap(next[static_cast<size_t>(i) - 1], next[static_cast<size_t>(i)]);
      if (index.emplace(next, static_cast<Index>(states.size())).second) {
        states.push_back(std::move(next));
      }
    }
  }
  const auto n = static_cast<Index>(states.size());

  RationalVector pi(n);
  Rational total(0);
  for (Index s = 0; s < n; ++s) {
    pi(s) = assignment_mass(M, states[static_cast<size_t>(s)]);
    total += pi(s);
  }
  for (Index s = 0; s < n; ++s) pi(s) /= total;

  // Swap i moves mode a from level i-1 to i and b from i to i-1; its
  // probability pi_bar(swapped)/pi_bar(tau) depends on (i, a, b) only.
  const Rational proposal(1, 2 * L);
  const auto m = static_cast<size_t>(inst.m);
  std::vector<Rational> move_prob(static_cast<size_t>(L + 1) * m * m);
  for (int i = 1; i <= L; ++i) {
    for (int a = 0; a < inst.m; ++a) {
      for (int b = 0; b < inst.m; ++b) {
        const Rational ratio = (M(i - 1, b) * M(i, a)) / (M(i - 1, a) * M(i, b));
        move_prob[(static_cast<size_t>(i) * m + a) * m + b] =
            proposal * (ratio < 1 ? ratio : Rational(1));
      }
    }
  }
  std::vector<std::vector<std::pair<Index, Rational>>> rows(static_cast<size_t>(n));
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<size_t>(n) * (static_cast<size_t>(L) + 1));
  for (Index s = 0; s < n; ++s) {
    const ProductAssignment& tau = states[static_cast<size_t>(s)];
    Rational stay(1);
    for (int i = 1; i <= L; ++i) {
      const int a = tau[static_cast<size_t>(i) - 1];
      const int b = tau[static_cast<size_t>(i)];
      const Rational& p = move_prob[(static_cast<size_t>(i) * m + a) * m + b];
      ProductAssignment next = tau;
      std::swap(next[static_cast<size_t>(i) - 1], next[static_cast<size_t>(i)]);
      const Index t = index.at(next);
      rows[static_cast<size_t>(s)].emplace_back(t, p);
      triplets.emplace_back(s, t, to_double(p));
      stay -= p;
    }
    rows[static_cast<size_t>(s)].emplace_back(s, stay);
    triplets.emplace_back(s, s, to_double(stay));
  }

  VectorXd pi_d(n);
  for (Index s = 0; s < n; ++s) pi_d(s) = to_double(pi(s));
  pi_d /= pi_d.sum();
  StochasticMatrix kernel =
      StochasticMatrix::from_triplets(n, triplets, pi_d, StateCodec::explicit_states(states, "assignment"));
  return ConstrainedChain{std::move(states), std::move(kernel), std::move(pi), std::move(rows)};
}

int divergence_cap(int L) {
  require(L >= 1, "divergence cap needs L >= 1");
  return floor_log2(L) - 1;
}

std::vector<ProductAssignment> enumerate_S(const HardInstance& inst) {
  const int h = divergence_cap(inst.L);
  const ProductAssignment lambda = identity_assignment(inst.L);
  std::vector<ProductAssignment> out{lambda};
  std::set<ProductAssignment> seen{lambda};
  for (size_t head = 0; head < out.size(); ++head) {
    for (int i = 1; i <= inst.L; ++i) {
      ProductAssignment next = out[head];
      std::swap(next[static_cast<size_t>(i) - 1], next[static_cast<size_t>(i)]);
      if (hamming(next, lambda) > h) continue;
      if (seen.insert(next).second) out.push_back(std::move(next));
    }
  }
  return out;
}

CertificateReport certificate(const HardInstance& inst, const CertificateOptions& options) {
  const ConstrainedChain chain = constrained_projected_chain(inst, options.max_L);
  const std::vector<ProductAssignment> S = enumerate_S(inst);
  const int L = inst.L;
  const StateCodec& codec = chain.kernel.codec();
  const auto n = chain.kernel.size();

  std::vector<char> in_S(static_cast<size_t>(n), 0);
  std::vector<Index> S_index;
  for (const auto& tau : S) {
    const Index s = codec.encode(tau);
    in_S[static_cast<size_t>(s)] = 1;
    S_index.push_back(s);
  }

  CertificateReport report;
  report.L = L;
  report.S_size = static_cast<Index>(S.size());
  report.Sc_size = n - report.S_size;
  report.mass_S = 0;
  report.boundary_flow = 0;
  for (Index s : S_index) {
    report.mass_S += chain.stationary(s);
    for (const auto& [t, p] : chain.exact_rows[static_cast<size_t>(s)]) {
      if (!in_S[static_cast<size_t>(t)]) report.boundary_flow += chain.stationary(s) * p;
    }
  }
  report.mass_Sc = Rational(1) - report.mass_S;

  const double e = std::numbers::e;
  const double inv = 1.0 / (L + 1);
  const int lg = floor_log2(L);
  const Rational smaller = std::min(report.mass_S, report.mass_Sc);
  report.cheeger_2phiS = smaller > 0 ? to_double(Rational(2 * report.boundary_flow / smaller))
                                     : std::numeric_limits<double>::infinity();
  if (report.Sc_size > 0) report.cheeger_2phiS_float = 2.0 * cheeger_ratio(chain.kernel, S_index);
  report.bound_rhs = 32.0 * e * e * std::pow(inv, lg - 8);

  report.flow_check = {to_double(report.boundary_flow), 4.0 * e * std::pow(inv, lg - 2), false};
  report.flow_check.passed = report.flow_check.value <= report.flow_check.bound;
  report.mass_S_check = {to_double(report.mass_S), 1.0 / (2.0 * e), false};
  report.mass_S_check.passed = report.mass_S_check.value > report.mass_S_check.bound;
  report.mass_Sc_check = {to_double(report.mass_Sc), 1.0 / (4.0 * e * std::pow(L + 1.0, 6)), false};
  report.mass_Sc_check.passed = report.mass_Sc_check.value > report.mass_Sc_check.bound;
  report.final_bound_check = report.cheeger_2phiS < report.bound_rhs;

  report.s_tilde_disjoint = true;
  for (Index s = 0; s < n; ++s) {
    const auto& tau = chain.states[static_cast<size_t>(s)];
    if (tau[static_cast<size_t>(L)] == 0 && tau[0] == L && in_S[static_cast<size_t>(s)]) {
      report.s_tilde_disjoint = false;
    }
  }

  if (options.compute_gap) {
    report.spectrum = spectral_gap(chain.kernel, options.spectral);
    report.measured_gap = report.spectrum->gap;
    report.gap_check = *report.measured_gap <= report.cheeger_2phiS + options.gap_tolerance;
  }
  report.passed = report.flow_check.passed && report.mass_S_check.passed &&
                  report.mass_Sc_check.passed && report.gap_check && report.final_bound_check &&
                  report.s_tilde_disjoint;
  return report;
}

TemperedFamily hard_instance_family(const HardInstance& inst) {
  std::vector<int> modes(static_cast<size_t>(inst.m));
  for (int k = 0; k < inst.m; ++k) modes[static_cast<size_t>(k)] = k;
  FiniteTarget target(VectorXd::Zero(inst.m), modes, inst.m);
  std::vector<double> betas(static_cast<size_t>(inst.L) + 1);
  for (int i = 0; i <= inst.L; ++i) {
    betas[static_cast<size_t>(i)] = static_cast<double>(i + 1) / (inst.L + 1);
  }
  MatrixXd levels(inst.L + 1, inst.m);
  for (int i = 0; i <= inst.L; ++i) {
    for (int k = 0; k < inst.m; ++k) levels(i, k) = to_double(inst.mode_masses(i, k));
  }
  return family_from_levels(target, TemperatureLadder(betas), levels);
}

}  // namespace tempering
