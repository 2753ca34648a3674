#include <charconv>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "virial/virial.hpp"

using namespace virial;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kFailed = 1, kConfig = 2, kModule = 3 };

struct Common {
  std::string config_path;
  int workers = default_workers();
  std::string format;
  long long seed = -1;
  double beta = -1;
  bool timings = false;
};

io::RunConfig resolve(const Common& c) {
  json root = json::object();
  if (!c.config_path.empty()) {
    auto cfg = io::load_config(c.config_path);
    root = cfg.resolved;
  }
  if (c.seed >= 0) root["seed"] = c.seed;
  if (c.beta > 0) root["beta"] = c.beta;
  if (!c.format.empty()) root["format"] = c.format;
  return io::config_from_json(root);
}

Configuration parse_eta(const std::string& text, int d) {
  Configuration eta;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Point p{0, 0, 0};
    std::stringstream cs(item);
    std::string coord;
    int k = 0;
    while (std::getline(cs, coord, ':')) {
      if (k >= d) throw ConfigError("--eta", "point '" + item + "' has more than " + std::to_string(d) + " coordinates");
      try {
        p[k++] = std::stod(coord);
      } catch (const std::exception&) {
        throw ConfigError("--eta", "cannot parse coordinate '" + coord + "'");
      }
    }
    if (k != d) throw ConfigError("--eta", "point '" + item + "' needs " + std::to_string(d) + " coordinates");
    eta.push_back(p);
  }
  if (eta.empty()) throw ConfigError("--eta", "at least one point is required");
  return eta;
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError(key, "cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

int report(const std::string& command, const io::RunConfig& cfg, json provenance, json result, bool passed = true) {
  emit(io::envelope(command, cfg, std::move(provenance), std::move(result)));
  return passed ? kOk : kFailed;
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int report_check(const std::string& command, const io::RunConfig& cfg, const checks::Outcome& o, bool timings) {
  return report(command, cfg, {{"oracle", "exact rational arithmetic and independent code paths"}},
                checks::to_json(o, timings), o.passed);
}

json chain_provenance() {
  return {{"oracle", "nearest-neighbour chain: exact convolution of piecewise-polynomial gap integrals"},
          {"closed_form", "Tonks partition function for hard rods"}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density expansions of correlation functions: symbolic kernels, cluster integrals, oracles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::kVersion);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON (.json) or TOML configuration file");
    sub->add_option("--workers", common.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", common.format, "json or csv");
    sub->add_option("--seed", common.seed, "override the configured seed");
    sub->add_option("--beta", common.beta, "override the configured inverse temperature");
    sub->add_flag("--timings", common.timings, "include wall-clock timings (breaks byte-identical output)");
  };

  std::function<int()> action;

  // algebra-check
  auto* algebra_cmd = app.add_subcommand("algebra-check", "random exact checks of the configuration algebra");
  int instances = 200, max_sites = 4;
  algebra_cmd->add_option("--instances", instances)->check(CLI::PositiveNumber);
  algebra_cmd->add_option("--max-sites", max_sites)->check(CLI::Range(1, 8));
  add_common(algebra_cmd);
  algebra_cmd->callback([&] {
    action = [&] {
      const auto cfg = resolve(common);
      return report_check("algebra-check", cfg, checks::algebra_identities(instances, cfg.seed, max_sites), common.timings);
    };
  });

  // graphs
  auto* graphs_cmd = app.add_subcommand("graphs", "labeled graph families");
  graphs_cmd->require_subcommand(1);
  auto* enumerate_cmd = graphs_cmd->add_subcommand("enumerate", "one graph per line as JSON");
  int white = 1, black = 0;
  std::string family = "D", reading = "rooted", constraint = "no-white-white";
  bool count_only = false;
  enumerate_cmd->add_option("--white", white)->check(CLI::NonNegativeNumber);
  enumerate_cmd->add_option("--black", black)->check(CLI::NonNegativeNumber);
  enumerate_cmd->add_option("--family", family, "D or all")->check(CLI::IsMember({"D", "all"}));
  enumerate_cmd->add_option("--reading", reading, "rooted or standard")->check(CLI::IsMember({"rooted", "standard"}));
  enumerate_cmd->add_option("--constraint", constraint, "edge rule for --family all")
      ->check(CLI::IsMember({"any", "no-white-white"}));
  enumerate_cmd->add_flag("--count", count_only, "print only the family size");
  add_common(enumerate_cmd);
  enumerate_cmd->callback([&] {
    action = [&] {
      const auto cfg = resolve(common);
      const auto rd = reading == "rooted" ? graph::DReading::rooted : graph::DReading::standard;
      const auto rule = constraint == "any" ? graph::EdgeRule::any : graph::EdgeRule::no_white_white;
      std::size_t count = 0;
      graph::for_each_graph(
          white, black, family == "D" ? graph::EdgeRule::no_white_white : rule,
          [&](const graph::LabeledGraph& g) {
            if (family == "D" && !graph::is_member_D(g, rd)) return;
            ++count;
            if (!count_only) std::cout << io::to_json(g).dump() << "\n";
          },
          cfg.caps.enumeration);
      if (count_only) std::cout << json{{"white", white}, {"black", black}, {"family", family}, {"count", count}}.dump() << "\n";
      return int(kOk);
    };
  });

  // counts
  auto* counts_cmd = app.add_subcommand("counts", "forest-count table as CSV");
  int max_m = 5, max_n = 5;
  bool linear = false;
  counts_cmd->add_option("--max-m", max_m)->check(CLI::Range(0, counting::kCountCap));
  counts_cmd->add_option("--max-n", max_n)->check(CLI::Range(0, counting::kCountCap));
  counts_cmd->add_flag("--linear", linear, "linearized recurrence with the closed form alongside");
  add_common(counts_cmd);
  counts_cmd->callback([&] {
    action = [&] {
      const auto cfg = resolve(common);
      if (max_m + max_n > counting::kCountCap) throw CapExceeded("counts: max-m + max-n exceeds the cap");
      const bool csv = common.format.empty() || cfg.format == "csv";
      json rows = json::array();
      if (csv) {
        std::cout << "# base: " << counting::CountTable::base_rule() << "\n";
        std::cout << (linear ? "m,n,recurrence,closed_form,agree\n" : "m,n,count\n");
      }
      counting::CountTable full(counting::CountTable::Mode::full);
      for (int m = linear ? 1 : 0; m <= max_m; ++m)
        for (int n = 0; n <= max_n; ++n) {
          if (linear) {
            const auto lc = counting::count_linear(m, n);
            if (csv)
              std::cout << m << "," << n << "," << lc.recurrence << "," << lc.closed_form << "," << (lc.agree() ? 1 : 0) << "\n";
            rows.push_back({{"m", m}, {"n", n}, {"recurrence", to_string(lc.recurrence)},
                            {"closed_form", to_string(lc.closed_form)}, {"agree", lc.agree()}});
          } else {
            if (csv) std::cout << m << "," << n << "," << full(m, n) << "\n";
            rows.push_back({{"m", m}, {"n", n}, {"count", to_string(full(m, n))}});
          }
        }
      if (!csv)
        return report("counts", cfg, {{"base_rule", counting::CountTable::base_rule()}, {"mode", linear ? "linear" : "full"}},
                      {{"rows", rows}});
      return int(kOk);
    };
  });

  // kernel
  auto* kernel_cmd = app.add_subcommand("kernel", "symbolic kernel as a term list");
  std::string method = "recurrence", pivot = "lowest";
  bool no_cancel = false;
  kernel_cmd->add_option("--white", white)->check(CLI::NonNegativeNumber);
  kernel_cmd->add_option("--black", black)->check(CLI::NonNegativeNumber);
  kernel_cmd->add_option("--method", method)->check(CLI::IsMember({"recurrence", "graphs"}));
  kernel_cmd->add_option("--pivot", pivot)->check(CLI::IsMember({"lowest", "highest"}));
  kernel_cmd->add_option("--reading", reading)->check(CLI::IsMember({"rooted", "standard"}));
  kernel_cmd->add_flag("--no-cancel", no_cancel, "keep every term of the recurrence (no merging)");
  add_common(kernel_cmd);
  kernel_cmd->callback([&] {
    action = [&] {
      const auto cfg = resolve(common);
      kernel::SymbolicKernel k;
      if (method == "recurrence")
        k = kernel::kernel_by_recurrence(white, black, !no_cancel,
                                         pivot == "lowest" ? kernel::Pivot::lowest : kernel::Pivot::highest,
                                         cfg.caps.symbolic);
      else
        k = kernel::kernel_by_graphs(white, black,
                                     reading == "rooted" ? graph::DReading::rooted : graph::DReading::standard,
                                     cfg.caps.enumeration);
      json result = io::to_json(k);
      if (no_cancel && method == "recurrence") result["census"] = to_string(kernel::term_census(k, true));
      return report("kernel", cfg, {{"method", method}, {"cancellation", !no_cancel}}, result);
    };
  });

  // kernel-hat
  auto* khat_cmd = app.add_subcommand("kernel-hat", "integrated kernel with per-graph breakdown");
  std::string eta_text;
  int order = 0;
  std::string route = "graphs";
  bool summary = false;
  khat_cmd->add_option("--eta", eta_text, "comma-separated points; coordinates joined by ':' when d > 1")->required();
  khat_cmd->add_option("--order", order)->check(CLI::Range(0, 5));
  khat_cmd->add_option("--route", route)->check(CLI::IsMember({"graphs", "recurrence", "both"}));
  khat_cmd->add_flag("--summary", summary, "omit the per-graph breakdown");
  add_common(khat_cmd);
  khat_cmd->callback([&] {
    action = [&] {
      const auto cfg = resolve(common);
      const int d = cfg.pot.dimension();
      const auto eta = parse_eta(eta_text, d);
      json result;
      if (route != "recurrence")
        result["graphs"] = io::to_json(numerics::kernel_hat(eta, order, cfg.pot, cfg.beta, cfg.quad, common.workers), d, !summary);
      if (route != "graphs")
        result["recurrence"] = io::to_json(numerics::kernel_hat_by_recurrence(eta, order, cfg.pot, cfg.beta, cfg.quad));
      return report("kernel-hat", cfg, {{"method", io::quadrature_to_json(cfg.quad)}}, result);
    };
  });

  // correlate
  auto* corr_cmd = app.add_subcommand("correlate", "truncated density expansion of rho(eta)");
  double rho = 0.05;
  int n_max = 2;
  bool with_q = false, with_limit = false;
  corr_cmd->add_option("--eta", eta_text)->required();
  corr_cmd->add_option("--rho", rho)->check(CLI::NonNegativeNumber);
  corr_cmd->add_option("--nmax", n_max)->check(CLI::Range(0, 5));
  corr_cmd->add_flag("--q-hat", with_q, "also report Q(rho) and a(rho)");
  corr_cmd->add_flag("--limit-check", with_limit, "also evaluate both sides of the thermodynamic-limit equation");
  add_common(corr_cmd);
  corr_cmd->callback([&] {
    action = [&] {
      const auto cfg = resolve(common);
      const int d = cfg.pot.dimension();
      const auto eta = parse_eta(eta_text, d);
      const auto s = series::build_correlation_series(eta, cfg.beta, cfg.pot, n_max, cfg.quad, common.workers);
      const auto r = series::evaluate(s, rho);
      json result = io::to_json(s, r, rho, d);
      if (with_q) {
        const auto q = series::q_hat_and_a(rho, cfg.beta, cfg.pot, n_max, cfg.quad, common.workers);
        json coeffs = json::array();
        for (const auto& c : q.coefficients) coeffs.push_back(io::to_json(c));
        result["q_hat"] = {{"value", q.q_hat}, {"a", q.a}, {"error", q.error}, {"coefficients", coeffs}};
      }
      if (with_limit) {
        const auto lc = series::limit_equation_check(eta, rho, cfg.beta, cfg.pot, n_max, cfg.quad, common.workers);
        result["limit_equation"] = {{"lhs", lc.lhs},
                                    {"rhs", lc.rhs},
                                    {"difference", lc.difference},
                                    {"error", lc.error},
                                    {"truncation", "O(rho^" + std::to_string(lc.truncation_order) + ")"}};
      }
      return report("correlate", cfg, {{"method", io::quadrature_to_json(cfg.quad)}}, result);
    };
  });

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "rho(eta) over a density grid, CSV");
  std::string rho_grid = "0.005,0.01,0.02,0.03,0.05";
  bool with_oracle = false;
  std::string n_list_text = "2,3,4,5,6";
  sweep_cmd->add_option("--eta", eta_text)->required();
  sweep_cmd->add_option("--rho-grid", rho_grid);
  sweep_cmd->add_option("--nmax", n_max)->check(CLI::Range(0, 5));
  sweep_cmd->add_flag("--oracle", with_oracle, "add the finite-N extrapolation (d = 1 step potentials)");
  sweep_cmd->add_option("--N-list", n_list_text);
  add_common(sweep_cmd);
  sweep_cmd->callback([&] {
    action = [&] {
      auto cfg = resolve(common);
      const int d = cfg.pot.dimension();
      const auto eta = parse_eta(eta_text, d);
      const auto rhos = parse_list(rho_grid, "--rho-grid");
      std::vector<int> n_list;
      for (double v : parse_list(n_list_text, "--N-list")) n_list.push_back(static_cast<int>(v));
      const auto s = series::build_correlation_series(eta, cfg.beta, cfg.pot, n_max, cfg.quad, common.workers);
      const bool csv = common.format.empty() || cfg.format == "csv";
      json rows = json::array();
      if (csv) std::cout << "rho,value,error,truncation_order" << (with_oracle ? ",oracle,relative_difference" : "") << "\n";
      for (double r : rhos) {
        const auto res = series::evaluate(s, r);
        json row = {{"rho", r}, {"value", res.value}, {"error", res.error}, {"truncation_order", res.truncation_order}};
        std::ostringstream line;
        line << shortest(r) << "," << shortest(res.value) << "," << shortest(res.error) << "," << res.truncation_order;
        if (with_oracle) {
          const auto ex = oracle::extrapolate_limit(eta, r, cfg.beta, cfg.pot, n_list);
          const double rel = std::abs(res.value - ex.limit) / std::abs(ex.limit);
          row["oracle"] = ex.limit;
          row["relative_difference"] = rel;
          line << "," << shortest(ex.limit) << "," << shortest(rel);
        }
        if (csv) std::cout << line.str() << "\n";
        rows.push_back(row);
      }
      if (!csv) return report("sweep", cfg, {{"method", io::quadrature_to_json(cfg.quad)}}, {{"rows", rows}});
      return int(kOk);
    };
  });

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "finite-N canonical ensemble in d = 1");
  oracle_cmd->require_subcommand(1);
  int N = 3;
  double half_width = 5.0, panel_width = oracle::KsGrid{}.panel_width;
  int gauss_order = oracle::KsGrid{}.gauss_order;
  bool refine = false;
  auto* oz = oracle_cmd->add_subcommand("z", "partition function");
  auto* oc = oracle_cmd->add_subcommand("corr", "finite-N correlation function");
  auto* ok = oracle_cmd->add_subcommand("ks-check", "finite-volume identity residual");
  auto* oe = oracle_cmd->add_subcommand("extrapolate", "1/N extrapolation at fixed density");
  for (auto* sub : {oz, oc, ok}) {
    sub->add_option("--N", N)->check(CLI::PositiveNumber);
    sub->add_option("--half-width", half_width)->check(CLI::PositiveNumber);
    add_common(sub);
  }
  oc->add_option("--eta", eta_text)->required();
  ok->add_option("--eta", eta_text)->required();
  ok->add_option("--panel-width", panel_width, "quadrature panel width in units of the interaction range");
  ok->add_option("--gauss-order", gauss_order)->check(CLI::Range(1, 64));
  ok->add_flag("--refine", refine, "also evaluate at half the panel width");
  oe->add_option("--eta", eta_text)->required();
  oe->add_option("--rho", rho)->check(CLI::PositiveNumber);
  oe->add_option("--N-list", n_list_text);
  add_common(oe);
  auto system_of = [&](const io::RunConfig& cfg) {
    if (N > cfg.caps.oracle_N) throw CapExceeded("oracle: N exceeds caps.oracle_N");
    return oracle::CanonicalSystem{N, oracle::Box{half_width}, cfg.beta, cfg.pot};
  };
  oz->callback([&] {
    action = [&] {
      const auto cfg = resolve(common);
      const auto sys = system_of(cfg);
      json result = {{"N", N}, {"half_width", half_width}, {"Z", oracle::partition_function(sys)}};
      if (cfg.pot.kind() == PotentialKind::hard_core) result["tonks"] = oracle::tonks_Z(N, half_width, cfg.pot.core());
      return report("oracle z", cfg, chain_provenance(), result);
    };
  });
  oc->callback([&] {
    action = [&] {
      const auto cfg = resolve(common);
      const auto eta = parse_eta(eta_text, 1);
      const auto sys = system_of(cfg);
      return report("oracle corr", cfg, chain_provenance(),
                    {{"N", N}, {"half_width", half_width}, {"eta", io::to_json(eta, 1)},
                     {"value", oracle::finite_correlation(eta, sys)}});
    };
  });
  ok->callback([&] {
    action = [&] {
      const auto cfg = resolve(common);
      const auto eta = parse_eta(eta_text, 1);
      const auto sys = system_of(cfg);
      const oracle::KsGrid grid{panel_width, gauss_order};
      json result;
      if (refine) {
        const auto r = oracle::ks_refinement(eta, sys, grid);
        result = {{"coarse", io::to_json(r.coarse)}, {"fine", io::to_json(r.fine)}, {"halved", r.halved}};
      } else {
        result = io::to_json(oracle::check_ks_identity(eta, sys, grid));
      }
      return report("oracle ks-check", cfg, chain_provenance(), result);
    };
  });
  oe->callback([&] {
    action = [&] {
      const auto cfg = resolve(common);
      const auto eta = parse_eta(eta_text, 1);
      std::vector<int> n_list;
      for (double v : parse_list(n_list_text, "--N-list")) n_list.push_back(static_cast<int>(v));
      const auto ex = oracle::extrapolate_limit(eta, rho, cfg.beta, cfg.pot, n_list);
      json result = io::to_json(ex);
      if (cfg.pot.kind() == PotentialKind::hard_core) result["tonks_a"] = oracle::tonks_a(rho, cfg.pot.core());
      return report("oracle extrapolate", cfg, chain_provenance(), result);
    };
  });

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "invariant suites");
  verify_cmd->require_subcommand(1);
  int max_total = 6, configs = 100;
  auto* v_t11 = verify_cmd->add_subcommand("first-order-zero", "kernel (1,1) vanishes after cancellation");
  v_t11->alias("t11");
  auto* v_cancel = verify_cmd->add_subcommand("first-order", "kernels (1,n), n = 1..4, vanish");
  auto* v_graph = verify_cmd->add_subcommand("graph-sum", "recurrence kernels equal graph sums");
  v_graph->alias("proposition-4-2");
  v_graph->add_option("--max", max_total)->check(CLI::Range(1, 7));
  auto* v_label = verify_cmd->add_subcommand("label-invariance", "choice of the distinguished particle");
  auto* v_reading = verify_cmd->add_subcommand("reading", "which membership reading of D the recurrence matches");
  v_reading->add_option("--max", max_total)->check(CLI::Range(1, 7));
  auto* v_count = verify_cmd->add_subcommand("counting", "closed form and term census");
  auto* v_boltz = verify_cmd->add_subcommand("boltzmann-expansion", "e^{-beta W} as a subset sum of Mayer products");
  v_boltz->add_option("--configs", configs)->check(CLI::PositiveNumber);
  for (auto* sub : {v_t11, v_cancel, v_graph, v_label, v_reading, v_count, v_boltz}) add_common(sub);
  v_t11->callback([&] { action = [&] { return report_check("verify t11", resolve(common), checks::t11(), common.timings); }; });
  v_cancel->callback([&] {
    action = [&] { return report_check("verify first-order", resolve(common), checks::first_order_cancellation(), common.timings); };
  });
  v_graph->callback([&] {
    action = [&] {
      return report_check("verify graph-sum", resolve(common), checks::graph_sum_equivalence(max_total), common.timings);
    };
  });
  v_label->callback([&] {
    action = [&] { return report_check("verify label-invariance", resolve(common), checks::label_invariance(), common.timings); };
  });
  v_reading->callback([&] {
    action = [&] {
      return report_check("verify reading", resolve(common), checks::reading_diagnostic(std::min(max_total, 6)), common.timings);
    };
  });
  v_count->callback([&] {
    action = [&] { return report_check("verify counting", resolve(common), checks::counting(), common.timings); };
  });
  v_boltz->callback([&] {
    action = [&] {
      const auto cfg = resolve(common);
      return report_check("verify boltzmann-expansion", cfg, checks::boltzmann_expansion(cfg.pot, cfg.beta, configs, cfg.seed),
                          common.timings);
    };
  });

  // potential
  auto* pot_cmd = app.add_subcommand("potential", "pair potential diagnostics");
  pot_cmd->require_subcommand(1);
  auto* pcheck = pot_cmd->add_subcommand("check", "regularity integral and stability probe");
  int trials = 10000, probe_n = 12;
  pcheck->add_option("--trials", trials)->check(CLI::PositiveNumber);
  pcheck->add_option("--n-max", probe_n)->check(CLI::Range(2, 200));
  add_common(pcheck);
  pcheck->callback([&] {
    action = [&] {
      const auto cfg = resolve(common);
      json result = {{"regularity_C", regularity_C(cfg.pot, cfg.beta)},
                     {"range", std::isfinite(cfg.pot.range()) ? json(cfg.pot.range()) : json("inf")},
                     {"cutoff", cfg.pot.cutoff(cfg.beta)},
                     {"stability", io::to_json(stability_probe(cfg.pot, trials, probe_n, cfg.seed))}};
      return report("potential check", cfg, {{"stability", "random probe, not a proof"}}, result);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return kOk;
    emit({{"error", {{"kind", "usage_error"}, {"message", e.what()}}}});
    return kConfig;
  }
  try {
    return action ? action() : kOk;
  } catch (const ConfigError& e) {
    emit(io::error_object(e));
    return kConfig;
  } catch (const Error& e) {
    emit(io::error_object(e));
    return kModule;
  } catch (const std::exception& e) {
    emit({{"error", {{"kind", "internal_error"}, {"message", e.what()}}}});
    return kModule;
  }
}
