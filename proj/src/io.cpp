#include "tempering/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "tempering/error.hpp"

namespace tempering {

namespace {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json float_precision(double residual) {
  return {{"kind", "float64"}, {"residual", residual}};
}

json vector_to_json(const VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

double parse_log_decimal(const std::string& text) {
  const auto e = text.find_first_of("eE");
  const std::string mantissa = text.substr(0, e);
  long exponent = 0;
  size_t used = 0;
  double m = 0.0;
  try {
    m = std::stod(mantissa, &used);
    if (used != mantissa.size()) throw std::invalid_argument(text);
    if (e != std::string::npos) {
      const std::string tail = text.substr(e + 1);
      exponent = std::stol(tail, &used);
      if (used != tail.size()) throw std::invalid_argument(text);
    }
  } catch (const std::logic_error&) {
    throw ArgumentError("not a decimal number: '" + text + "'");
  }
  require(m > 0.0 && std::isfinite(m), "weight must be positive: '" + text + "'");
  return std::log(m) + static_cast<double>(exponent) * std::numbers::ln10;
}

TemperedFamily parse_family(const json& doc) {
  try {
    require(doc.is_object(), "family document must be an object");
    require(doc.contains("atoms") && doc.at("atoms").is_array(), "missing 'atoms' array");
    require(doc.contains("betas") && doc.at("betas").is_array(), "missing 'betas' array");
    const json& atoms = doc.at("atoms");
    require(!atoms.empty(), "'atoms' is empty");
    VectorXd log_weights(static_cast<Index>(atoms.size()));
    std::vector<int> modes;
    int num_modes = 0;
    for (size_t a = 0; a < atoms.size(); ++a) {
      const json& atom = atoms[a];
      double lw = 0.0;
      if (atom.contains("log_weight")) {
        lw = atom.at("log_weight").get<double>();
      } else {
        const json& w = atom.at("weight");
        if (w.is_string()) {
          lw = parse_log_decimal(w.get<std::string>());
        } else {
          const double v = w.get<double>();
          require(v > 0.0, "weight must be positive");
          lw = std::log(v);
        }
      }
      const int mode = atom.at("mode").get<int>();
      require(mode >= 0, "mode labels are 0-based and nonnegative");
      log_weights(static_cast<Index>(a)) = lw;
      modes.push_back(mode);
      num_modes = std::max(num_modes, mode + 1);
    }
    if (doc.contains("num_modes")) num_modes = doc.at("num_modes").get<int>();
    FiniteTarget target(log_weights, modes, num_modes);
    TemperatureLadder ladder(doc.at("betas").get<std::vector<double>>());
    return temper(target, ladder);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("malformed family document: ") + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ArgumentError("invalid JSON in '" + path + "': " + e.what());
  }
}

TemperedFamily load_family(const std::string& path) { return parse_family(read_json_file(path)); }

json family_to_json(const TemperedFamily& family) {
  json atoms = json::array();
  const FiniteTarget& t = family.target();
  for (Index a = 0; a < t.num_atoms(); ++a) {
    atoms.push_back({{"log_weight", t.log_weights()(a)}, {"mode", t.mode_of(a)}});
  }
  return {{"atoms", atoms}, {"betas", family.ladder().betas()}, {"num_modes", t.num_modes()}};
}

StochasticMatrix parse_kernel(const json& doc) {
  try {
    const auto rows = doc.at("matrix").get<std::vector<std::vector<double>>>();
    const auto n = static_cast<Index>(rows.size());
    require(n > 0, "empty matrix");
    MatrixXd p(n, n);
    for (Index x = 0; x < n; ++x) {
      require(static_cast<Index>(rows[static_cast<size_t>(x)].size()) == n, "matrix must be square");
      for (Index y = 0; y < n; ++y) p(x, y) = rows[static_cast<size_t>(x)][static_cast<size_t>(y)];
    }
    VectorXd pi(n);
    if (doc.contains("stationary")) {
      const auto v = doc.at("stationary").get<std::vector<double>>();
      require(static_cast<Index>(v.size()) == n, "stationary length does not match the matrix");
      pi = Eigen::Map<const VectorXd>(v.data(), n);
    } else {
      Eigen::EigenSolver<MatrixXd> solver(p.transpose());
      Index best = 0;
      (solver.eigenvalues().array() - 1.0).abs().minCoeff(&best);
      pi = solver.eigenvectors().col(best).real();
      pi /= pi.sum();
      require((pi.array() >= -1e-12).all(), "matrix has no nonnegative stationary vector");
      pi = pi.cwiseMax(0.0);
      pi /= pi.sum();
    }
    return StochasticMatrix::from_dense(p, pi, StateCodec::plain(n));
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("malformed kernel document: ") + e.what());
  }
}

json codec_to_json(const StateCodec& codec) {
  json j = {{"label", codec.label()}, {"size", codec.size()}};
  switch (codec.kind()) {
    case StateCodec::Kind::kPlain:
      j["kind"] = "plain";
      break;
    case StateCodec::Kind::kMixedRadix:
      j["kind"] = "mixed-radix";
      j["radix"] = codec.radix();
      j["length"] = codec.length();
      j["order"] = "position 0 most significant";
      break;
    case StateCodec::Kind::kExplicit: {
      j["kind"] = "explicit";
      json states = json::array();
      for (Index s = 0; s < codec.size(); ++s) states.push_back(codec.decode(s));
      j["states"] = states;
      break;
    }
  }
  return j;
}

json kernel_header(const StochasticMatrix& kernel) {
  return {{"size", kernel.size()},
          {"nonzeros", kernel.entries().nonZeros()},
          {"codec", codec_to_json(kernel.codec())},
          {"stationary", vector_to_json(kernel.stationary())},
          {"columns", {"row", "col", "value"}}};
}

void write_kernel_csv(std::ostream& out, const StochasticMatrix& kernel) {
  out << "row,col,value\n";
  const SparseMatrix& p = kernel.entries();
  for (Index x = 0; x < p.outerSize(); ++x) {
    for (SparseMatrix::InnerIterator it(p, x); it; ++it) {
      out << x << ',' << it.col() << ',' << format_double(it.value()) << '\n';
    }
  }
}

json rational_to_json(const Rational& q) {
  return {{"exact", q.get_str()}, {"approx", q.get_d()}};
}

void to_json(json& j, const SpectrumReport& r) {
  j = {{"gap", r.gap},
       {"second_eigenvalue", r.second_eigenvalue},
       {"method", to_string(r.method)},
       {"residual", r.residual},
       {"iterations", r.iterations},
       {"nonnegative_definite", r.nonnegative_definite},
       {"precision", float_precision(r.residual)}};
  if (std::isfinite(r.min_eigenvalue)) {
    j["min_eigenvalue"] = r.min_eigenvalue;
  } else {
    j["min_eigenvalue"] = nullptr;
  }
}

void to_json(json& j, const CongestionReport& r) {
  j = {{"c", r.c},
       {"argmax_edge", {r.argmax_edge.first, r.argmax_edge.second}},
       {"num_paths", r.num_paths},
       {"num_loaded_edges", r.per_edge_loads.size()},
       {"precision", float_precision(0.0)}};
}

void to_json(json& j, const MultiplicityReport& r) {
  j = {{"max_multiplicity", r.max_multiplicity},
       {"bound", r.bound},
       {"paths", r.paths},
       {"passed", r.passed}};
}

void to_json(json& j, const MassRatioReport& r) {
  j = {{"worst_ratio", r.worst_ratio}, {"states_checked", r.states_checked}, {"passed", r.passed}};
}

void to_json(json& j, const ModeMassReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    json cell = {{"level", c.level},
                 {"mode", c.mode},
                 {"dominant", c.dominant},
                 {"value", rational_to_json(c.value)},
                 {"lower_margin", rational_to_json(c.lower_margin)},
                 {"passed", c.passed}};
    if (c.upper_margin) cell["upper_margin"] = rational_to_json(*c.upper_margin);
    cells.push_back(cell);
  }
  j = {{"cells", cells},
       {"min_margin", rational_to_json(r.min_margin)},
       {"passed", r.passed},
       {"precision", {{"kind", "exact-rational"}}}};
}

void to_json(json& j, const BottleneckReport& r) {
  j = {{"B", rational_to_json(r.B)},
       {"bound", rational_to_json(r.bound)},
       {"margin", rational_to_json(r.margin)},
       {"ratio", r.ratio},
       {"passed", r.passed},
       {"precision", {{"kind", "exact-rational"}}}};
}

void to_json(json& j, const CertificateReport& r) {
  auto check = [](const BoundCheck& c) {
    return json{{"value", c.value}, {"bound", c.bound}, {"passed", c.passed}};
  };
  j = {{"L", r.L},
       {"S_size", r.S_size},
       {"Sc_size", r.Sc_size},
       {"mass_S", rational_to_json(r.mass_S)},
       {"mass_Sc", rational_to_json(r.mass_Sc)},
       {"boundary_flow", rational_to_json(r.boundary_flow)},
       {"cheeger_2phiS", r.cheeger_2phiS},
       {"cheeger_2phiS_float", r.cheeger_2phiS_float},
       {"bound_rhs", r.bound_rhs},
       {"flow_check", check(r.flow_check)},
       {"mass_S_check", check(r.mass_S_check)},
       {"mass_Sc_check", check(r.mass_Sc_check)},
       {"gap_check", r.gap_check},
       {"final_bound_check", r.final_bound_check},
       {"s_tilde_disjoint", r.s_tilde_disjoint},
       {"passed", r.passed},
       {"precision",
        {{"masses_and_flow", "exact-rational"},
         {"gap", r.spectrum ? float_precision(r.spectrum->residual) : json(nullptr)}}}};
  if (r.spectrum) {
    j["measured_gap"] = r.spectrum->gap;
    j["spectrum"] = *r.spectrum;
  } else {
    j["measured_gap"] = nullptr;
  }
}

void to_json(json& j, const FOracleResult& r) {
  j = {{"L", r.L}, {"f", r.f}, {"pad", r.pad}, {"states_explored", r.states_explored}};
}

void to_json(json& j, const Move& move) {
  if (move.kind == Move::Kind::kAdjSwap) {
    j = {{"kind", "AdjSwap"}, {"level", move.index}};
  } else {
    j = {{"kind", "SetLevel0"}, {"mode", move.index}};
  }
}

void to_json(json& j, const InequalityCheck& c) {
  j = {{"lhs", c.lhs}, {"rhs", c.rhs}, {"passed", c.passed}};
}

void to_json(json& j, const LowerBoundReport& r) {
  j = {{"L", r.L},
       {"m", r.m},
       {"phi", r.phi},
       {"B", r.B},
       {"congestion", r.congestion},
       {"c", r.congestion.c},
       {"gap_P1", r.gap_P1},
       {"gap_P2", r.gap_P2},
       {"comparison", r.comparison},
       {"gap_pt", r.gap_pt},
       {"gap_pt_projected", r.gap_pt_projected},
       {"min_restricted_gap", r.min_restricted_gap},
       {"min_block_gap", r.min_block_gap},
       {"projected_update_gaps", r.projected_update_gaps},
       {"product_decomposition", r.product_decomposition},
       {"restricted_chain", r.restricted_chain},
       {"projected_chain", r.projected_chain},
       {"passed", r.passed},
       {"precision", float_precision(0.0)}};
}

json instance_to_json(const HardInstance& inst) {
  auto list = [](const std::vector<Rational>& v) {
    json out = json::array();
    for (const auto& q : v) out.push_back(q.get_str());
    return out;
  };
  json masses = json::array();
  json betas = json::array();
  for (int i = 0; i <= inst.L; ++i) {
    json row = json::array();
    for (int k = 0; k < inst.m; ++k) row.push_back(inst.mode_masses(i, k).get_str());
    masses.push_back(row);
    betas.push_back(Rational(i + 1, inst.L + 1).get_str());
  }
  return {{"L", inst.L},
          {"m", inst.m},
          {"gamma", inst.gamma.get_str()},
          {"betas", betas},
          {"mode_masses", masses},
          {"w", list(inst.w)},
          {"V", list(inst.V)},
          {"w_r", list(inst.w_r)},
          {"V_r", list(inst.V_r)},
          {"precision", {{"kind", "exact-rational"}}}};
}

void write_trace_csv(std::ostream& out, const PTTrace& trace, bool all_levels) {
  out << "iteration,level,atom\n";
  for (Index n = 0; n < trace.N; ++n) {
    for (int i = all_levels ? 0 : trace.L; i <= trace.L; ++i) {
      out << n + 1 << ',' << i << ',' << trace.samples(n, i) << '\n';
    }
  }
}

json trace_summary(const PTTrace& trace, const TemperedFamily& family) {
  json rates = json::array();
  for (const auto& r : swap_stats(trace)) rates.push_back(r ? json(*r) : json(nullptr));
  json occupancy = json::array();
  for (int i = 0; i <= trace.L; ++i) {
    occupancy.push_back(vector_to_json(mode_occupancy(trace, family.target(), i)));
  }
  return {{"N", trace.N},
          {"seed", trace.seed},
          {"L", trace.L},
          {"swap_attempts", trace.swap_attempts},
          {"swap_accepts", trace.swap_accepts},
          {"swap_rates", rates},
          {"mode_occupancy", occupancy},
          {"exact_mode_masses", [&] {
             json rows = json::array();
             for (int i = 0; i <= trace.L; ++i) {
               rows.push_back(vector_to_json(family.block_masses().row(i).transpose()));
             }
             return rows;
           }()},
          {"precision", float_precision(0.0)}};
}

}  // namespace tempering
