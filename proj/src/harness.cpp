#include "edgespec/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cerrno>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>

#include "edgespec/cone_kernels.hpp"
#include "edgespec/edge_parametrix.hpp"
#include "edgespec/errors.hpp"
#include "edgespec/gb_algebra.hpp"
#include "edgespec/halfline.hpp"
#include "edgespec/model_operators.hpp"
#include "edgespec/scales_lab.hpp"
#include "edgespec/special_functions.hpp"

namespace edgespec::harness {

using nlohmann::json;

namespace {

const std::vector<std::pair<std::string, Suite>>& suite_names() {
  static const std::vector<std::pair<std::string, Suite>> names = {
      {"bessel", Suite::bessel}, {"schur", Suite::schur}, {"model", Suite::model},    {"parametrix", Suite::parametrix},
      {"gb", Suite::gb},         {"scales", Suite::scales}, {"witt", Suite::witt}, {"all", Suite::all}};
  return names;
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string value_string(const json& v) {
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + value_string(v[i]);
    return s;
  }
  if (v.is_number_float()) return fmt12(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

// Collects records and times each check.
class Recorder {
 public:
  void run(const std::string& check, json params, const std::function<void(CheckRecord&)>& body) {
    CheckRecord r;
    r.check = check;
    r.params = std::move(params);
    auto t0 = std::chrono::steady_clock::now();
    body(r);
    auto t1 = std::chrono::steady_clock::now();
    r.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    out.push_back(std::move(r));
  }
  std::vector<CheckRecord> out;
};

void upper(CheckRecord& r, double measured, double bound) {
  r.measured = measured;
  r.bound = bound;
  r.pass = std::isfinite(measured) && measured <= bound;
}

void lower(CheckRecord& r, double measured, double bound) {
  r.measured = measured;
  r.bound = bound;
  r.pass = std::isfinite(measured) && measured >= bound;
}

std::vector<double> log_space(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(a * std::pow(b / a, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1)));
  return v;
}

void suite_bessel(const RunConfig& c, Recorder& rec) {
  using special::BesselOrder;
  const auto nus = log_space(0.5, 1000.0, 50), xs = log_space(1e-3, 1e4, 50);
  rec.run("bessel.wronskian", {{"grid", "50x50"}, {"nu_range", {0.5, 1000.0}}, {"x_range", {1e-3, 1e4}}},
          [&](CheckRecord& r) {
            double worst = 0.0;
            for (double nu : nus)
              for (double x : xs) {
                auto p = special::bessel_ik_scaled(BesselOrder(nu), x);
                worst = std::max(worst, std::abs(x * (p.i0 * p.k1 + p.i1 * p.k0) - 1.0));
              }
            upper(r, worst, 1e-10 * c.tol_factor);
          });
  rec.run("bessel.olver_bound", {{"n_terms", 4}, {"mu_min", 10.0}}, [&](CheckRecord& r) {
    // largest |error| / (eta bound + reference bound) over the grid
    double worst = 0.0;
    for (double nu : nus) {
      if (nu < 10.0) continue;
      for (double x : xs) {
        auto ref = special::bessel_ik_scaled(BesselOrder(nu), x);
        auto iu = special::bessel_i_uniform(BesselOrder(nu), x, 4, true);
        auto ku = special::bessel_k_uniform(BesselOrder(nu), x, 4, true);
        double ei = std::abs(iu.value / ref.i0 - 1.0), ek = std::abs(ku.value / ref.k0 - 1.0);
        worst = std::max(worst, ei / (iu.err_bound + ref.err_bound));
        worst = std::max(worst, ek / (ku.err_bound + ref.err_bound));
      }
    }
    upper(r, worst, 1.0);
  });
  rec.run("bessel.olver_scaling", {{"n_terms", 4}, {"mu", {10.0, 20.0, 40.0}}}, [&](CheckRecord& r) {
    // mu^4 eta-bound should change by less than a factor 2 between 10, 20, 40
    double worst = 1.0;
    for (double z : {0.1, 0.5, 1.0, 2.0, 10.0}) {
      std::vector<double> scaled;
      for (double mu : {10.0, 20.0, 40.0}) {
        auto b = special::olver_error_bounds(4, mu, z);
        scaled.push_back(std::max(b.eta1, b.eta2) * std::pow(mu, 4));
      }
      for (std::size_t i = 1; i < scaled.size(); ++i) {
        double q = scaled[i] / scaled[i - 1];
        worst = std::max(worst, std::max(q, 1.0 / q));
      }
    }
    upper(r, worst, 2.0);
  });
}

std::vector<double> schur_nus(const RunConfig& c) {
  if (c.nu) return {*c.nu};
  return {1.6, 2.0, 3.0, 5.0, 10.0};
}

void suite_schur(const RunConfig& c, Recorder& rec) {
  const double beta = c.beta.value_or(0.0);
  auto grid = halfline::build_grid(c.grid_n, c.x_min, c.x_max);
  for (double nu : schur_nus(c)) {
    json p = {{"nu", nu}, {"beta", beta}, {"grid_n", c.grid_n}, {"x_min", c.x_min}, {"x_max", c.x_max}};
    rec.run("schur.norm", p, [&](CheckRecord& r) {
      auto k = model::green_kernel({model::BlockKind::scalar_L2, nu, beta}, c.delta_min);
      double m = halfline::operator_norm(halfline::nystrom_assemble(k, {-2, 0}, grid));
      upper(r, m, 1.0 / (nu * nu - 2.25));
      r.pass = m <= 1.05 * c.tol_factor / (nu * nu - 2.25);
    });
    if (beta == 0.0) {
      auto k = kernels::ConeKernel::free(nu, c.delta_min);
      auto exact = kernels::free_schur_integrals(nu);
      rec.run("schur.row_integral", {{"nu", nu}, {"x", 1.0}}, [&](CheckRecord& r) {
        double q = kernels::schur_row_integral(k, {-2, 0}, 1.0);
        upper(r, std::abs(q - exact.row) / exact.row, 1e-8 * c.tol_factor);
      });
      rec.run("schur.col_integral", {{"nu", nu}, {"y", 1.0}}, [&](CheckRecord& r) {
        double q = kernels::schur_col_integral(k, {-2, 0}, 1.0);
        upper(r, std::abs(q - exact.col) / exact.col, 1e-8 * c.tol_factor);
      });
    }
  }
}

void suite_model(const RunConfig& c, Recorder& rec) {
  for (double nu : {1.6, 2.1, 5.0})
    for (double beta : {0.0, 1.0}) {
      double r400 = 0.0, r800 = 0.0;
      rec.run("model.round_trip", {{"nu", nu}, {"beta", beta}, {"grid_n", 400}}, [&](CheckRecord& r) {
        r400 = model::round_trip_residual(nu, beta, 400, c.x_min, c.x_max, c.delta_min);
        upper(r, r400, 1e-2 * c.tol_factor);
      });
      rec.run("model.round_trip_order", {{"nu", nu}, {"beta", beta}, {"grid_n", {400, 800}}}, [&](CheckRecord& r) {
        r800 = model::round_trip_residual(nu, beta, 800, c.x_min, c.x_max, c.delta_min);
        lower(r, std::log2(r400 / r800), 1.8);
      });
    }
  rec.run("model.square_identity", {{"s", 1.6}, {"beta", 0.0}, {"grid_n", {200, 400, 800}}}, [&](CheckRecord& r) {
    auto u = [](double x) { return std::exp(-2.0 * std::pow(std::log(x), 2)); };
    auto rep = model::verify_square_identity(1.6, 0.0, u, u, {200, 400, 800}, 1e-2, 1e2);
    lower(r, *std::min_element(rep.observed_orders.begin(), rep.observed_orders.end()), 1.0);
  });
  for (double beta : {0.0, 1.0})
    rec.run("model.injectivity", {{"nu", 2.1}, {"beta", beta}}, [&](CheckRecord& r) {
      auto ws = model::injectivity_witness(2.1, beta);
      double growth = std::numeric_limits<double>::infinity();
      for (const auto& w : ws)
        for (std::size_t i = 1; i < w.norms.size(); ++i) growth = std::min(growth, w.norms[i] / w.norms[i - 1]);
      lower(r, growth, 1.25);
    });
  for (double beta : {0.0, 1.0})
    for (double nu : {2.0, 5.0, 10.0})
      rec.run("model.decay", {{"nu", nu}, {"beta", beta}, {"delta", 0.5}},
              [&](CheckRecord& r) { upper(r, model::decay_sup(nu, beta, 0.5), 0.25); });

  model::FiberSpectrum spec{{1.6, 2.5, 4.5, 9.5}, c.gap};
  model::SweepConfig sc;
  sc.grid_n = c.grid_n;
  sc.x_min = c.x_min;
  sc.x_max = c.x_max;
  sc.delta_min = c.delta_min;
  model::SweepTable table;
  auto ratio = [&](double model::SweepRow::*field) {
    std::vector<double> v;
    for (const auto& row : table.rows) v.push_back(row.*field);
    return *std::max_element(v.begin(), v.end()) / model::median(v);
  };
  json sp = {{"spectrum", spec.eigenvalues}, {"beta", {0.1, 1.0, 10.0}}, {"grid_n", c.grid_n}};
  rec.run("model.sweep_nu1", sp, [&](CheckRecord& r) {
    table = model::uniform_bound_sweep(spec, {0.1, 1.0, 10.0}, sc);
    upper(r, ratio(&model::SweepRow::nu1_ratio), 1.1);
  });
  rec.run("model.sweep_norm2", sp, [&](CheckRecord& r) { upper(r, ratio(&model::SweepRow::norm2), 1.1); });
  rec.run("model.sweep_schur", sp, [&](CheckRecord& r) { upper(r, ratio(&model::SweepRow::schur_ratio), 1.1); });
}

void suite_parametrix(const RunConfig& c, Recorder& rec) {
  parametrix::EdgeModel m;
  m.grid = halfline::build_grid(c.grid_n, c.x_min, c.x_max);
  m.ny = c.y_modes;
  m.fiber_s = c.fiber_spectrum();
  m.gap = c.gap;
  m.validate();
  for (auto o : {parametrix::Order::first, parametrix::Order::second}) {
    const std::string on = o == parametrix::Order::first ? "first" : "second";
    json p = {{"order", on}, {"grid_n", c.grid_n}, {"y_modes", c.y_modes}, {"fibers", m.fibers()}, {"trials", 20},
              {"seed", c.seed}};
    rec.run("parametrix.residual", p, [&](CheckRecord& r) {
      double worst = 0.0;
      for (int t = 0; t < 20; ++t) {
        auto u = parametrix::random_compact_input(m, o, c.seed + static_cast<std::uint64_t>(t));
        worst = std::max(worst, parametrix::right_inverse_residual(m, u, o));
      }
      upper(r, worst, 1e-8 * c.tol_factor);
    });
    rec.run("parametrix.fitted_c_stability", {{"order", on}, {"grid_n", {200, 400}}, {"seed", c.seed}},
            [&](CheckRecord& r) {
              double fc[2];
              int k = 0;
              for (int n : {200, 400}) {
                auto mm = m;
                mm.grid = halfline::build_grid(n, c.x_min, c.x_max);
                auto u = parametrix::random_compact_input(mm, o, c.seed);
                fc[k++] = parametrix::mapping_bounds(mm, u, o).fitted_c;
              }
              upper(r, std::abs(fc[1] - fc[0]) / fc[1], 0.05);
            });
  }
}

void suite_gb(const RunConfig&, Recorder& rec) {
  auto cr = gb::commutator_report();
  auto nonzero = [](const gb::CliffordMatrix& m) {
    double n = 0;
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) n += m(i, j).is_zero() ? 0 : 1;
    return n;
  };
  auto exact_zero = [&](CheckRecord& r, const gb::CliffordMatrix& m) {
    r.measured = nonzero(m);
    r.bound = 0.0;
    r.pass = m.is_zero();
  };
  rec.run("gb.commutator", {{"pair", "gamma_s"}}, [&](CheckRecord& r) { exact_zero(r, cr.gamma_s); });
  rec.run("gb.commutator", {{"pair", "gamma_t"}}, [&](CheckRecord& r) { exact_zero(r, cr.gamma_t); });
  rec.run("gb.commutator", {{"pair", "t_s"}}, [&](CheckRecord& r) { exact_zero(r, cr.t_s); });
  rec.run("gb.grading", json::object(), [&](CheckRecord& r) { exact_zero(r, cr.grading); });
  rec.run("gb.structure", json::object(), [&](CheckRecord& r) {
    auto s = gb::structure_report();
    int failures = !s.gamma_square_minus_identity + !s.gamma_skew + !s.gamma_orthogonal +
                   !s.sign_matrices_involutive + !s.omega_from_sigmas + !s.gamma_from_kron;
    r.measured = failures;
    r.bound = 0.0;
    r.pass = s.all();
  });
  gb::ModelEdgeDirac model{{2.1, 3.5}, {1.0, -0.5}};
  rec.run("gb.symbolic_square", {{"a", model.a_spectrum}, {"dy", model.dy_spectrum}}, [&](CheckRecord& r) {
    auto s = gb::symbolic_square(model);
    r.measured = (s.identity_holds ? 0 : 1) + (s.componentwise_s_s1 ? 0 : 1);
    r.bound = 0.0;
    r.pass = s.identity_holds && s.componentwise_s_s1;
  });
  rec.run("gb.dirac_square_order", {{"a", 2.1}, {"dy", 1.0}, {"grid_n", {200, 400, 800}}}, [&](CheckRecord& r) {
    auto u = [](double x) { return std::exp(-2.0 * std::pow(std::log(x), 2)); };
    auto rep = gb::dirac_square_structure({{2.1}, {1.0}}, u, {200, 400, 800}, 1e-2, 1e2);
    lower(r, *std::min_element(rep.observed_orders.begin(), rep.observed_orders.end()), 1.0);
  });
}

void suite_scales(const RunConfig& c, Recorder& rec) {
  const std::uint64_t seed = c.seed;
  rec.run("scales.tensor_power", {{"d", 3}, {"trials", 20}, {"s", {0.3, 0.5, 1.0, 1.7, 2.0}}, {"seed", seed}},
          [&](CheckRecord& r) {
            double worst = 0.0;
            for (int t = 0; t < 20; ++t) {
              auto g1 = scales::random_generator(3, seed + 1000 + 2 * t), g2 = scales::random_generator(3, seed + 1001 + 2 * t);
              worst = std::max(worst, scales::tensor_power_identity(g1, g2, {0.3, 0.5, 1.0, 1.7, 2.0}).max_rel_error);
            }
            upper(r, worst, 1e-10);
          });
  for (double s : {0.5, 1.0, 2.0})
    rec.run("scales.intersection", {{"d", 3}, {"s", s}, {"theta", 0.3}, {"trials", 200}, {"seed", seed}},
            [&](CheckRecord& r) {
              auto g1 = scales::random_generator(3, seed + 1), g2 = scales::random_generator(3, seed + 2);
              auto rep = scales::intersection_scale_check(g1, g2, s, 0.3, 200, seed + 3);
              upper(r, rep.sandwich_violations + rep.theta_violations, 0.0);
            });
  rec.run("scales.positivity", {{"n", 3}, {"d", 2}, {"trials", 200}, {"seed", seed}}, [&](CheckRecord& r) {
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 200; ++t) {
      auto a = scales::random_psd(3, 2, seed + 5000 + 4 * t, 1 + t % 6);
      auto b = scales::random_psd(3, 2, seed + 5001 + 4 * t, 1 + (t / 6) % 6);
      auto rep = scales::tensor_positivity_check(a, b, 1, seed + 5002 + 4 * t);
      worst = std::min({worst, rep.block_tensor_min, rep.summed_min, rep.monotone_min});
    }
    lower(r, worst, -1e-10);
  });
  rec.run("scales.same_scale", {{"a", 1.0}, {"length", std::numbers::pi}, {"n", 400}, {"modes", 3}}, [&](CheckRecord& r) {
    auto rep = scales::same_scale_demo(1.0, std::numbers::pi, 400, 3);
    double worst = 0.0;
    for (const auto& m : rep.modes) worst = std::max(worst, m.robin / m.plain);
    upper(r, worst, 0.1);
  });
}

void suite_witt(const RunConfig& c, Recorder& rec) {
  std::vector<double> spec = c.spectrum.value_or(std::vector<double>{1.6, -1.6, 2.5, -2.5});
  rec.run("witt.check", {{"spectrum", spec}, {"gap", c.gap}}, [&](CheckRecord& r) {
    auto w = model::check_witt({spec, c.gap});
    r.measured = w.min_abs;
    r.bound = c.gap;
    r.pass = w.passes;
  });
}

}  // namespace

Suite parse_suite(const std::string& name) {
  for (const auto& [n, s] : suite_names())
    if (n == name) return s;
  throw ConfigError("unknown suite '" + name + "'");
}

std::string to_string(Suite s) {
  for (const auto& [n, v] : suite_names())
    if (v == s) return n;
  return "?";
}

OutputFormat parse_format(const std::string& name) {
  if (name == "json") return OutputFormat::json;
  if (name == "csv") return OutputFormat::csv;
  throw ConfigError("unknown output format '" + name + "'");
}

void RunConfig::validate() const {
  if (grid_n < 16) throw ConfigError("grid_n must be at least 16");
  if (!(x_min > 0.0) || !(x_max > x_min) || !std::isfinite(x_max)) throw ConfigError("need 0 < x_min < x_max");
  if (y_modes < 2 || y_modes > parametrix::kMaxYModes || (y_modes & (y_modes - 1)) != 0)
    throw ConfigError("y_modes must be a power of two in [2, 64]");
  if (fiber_modes < 2 || fiber_modes % 2 != 0) throw ConfigError("fiber_modes must be even and at least 2");
  if (!(delta_min > 0.0) || !std::isfinite(delta_min)) throw ConfigError("delta_min must be positive");
  if (!(gap >= 0.0) || !std::isfinite(gap)) throw ConfigError("gap must be nonnegative");
  if (!(tol_factor > 0.0) || !std::isfinite(tol_factor)) throw ConfigError("tol_factor must be positive");
  if (nu && (!std::isfinite(*nu) || !(*nu > 0.0))) throw ConfigError("nu must be positive");
  if (beta && (!std::isfinite(*beta) || *beta < 0.0)) throw ConfigError("beta must be nonnegative");
  if (spectrum) {
    if (spectrum->empty()) throw ConfigError("spectrum must not be empty");
    for (double s : *spectrum)
      if (!std::isfinite(s)) throw ConfigError("spectrum entries must be finite");
  }
}

std::vector<double> RunConfig::fiber_spectrum() const {
  if (spectrum) return *spectrum;
  std::vector<double> s;
  for (int j = 0; j < fiber_modes / 2; ++j) {
    s.push_back(1.6 + 0.9 * j);
    s.push_back(-(1.6 + 0.9 * j));
  }
  return s;
}

void apply_env_overrides(RunConfig& config) {
  const char* v = std::getenv("EDGESPEC_SEED");
  if (!v || !*v) return;
  char* end = nullptr;
  errno = 0;
  unsigned long long s = std::strtoull(v, &end, 10);
  if (errno != 0 || *end != '\0' || v[0] == '-') throw ConfigError(std::string("EDGESPEC_SEED is not an unsigned integer: ") + v);
  config.seed = s;
}

std::string CheckRecord::param_string() const {
  std::string s;
  for (auto it = params.begin(); it != params.end(); ++it) {
    if (!s.empty()) s += ";";
    s += it.key() + "=" + value_string(it.value());
  }
  return s;
}

json CheckRecord::to_json() const {
  json j;
  j["check"] = check;
  j["params"] = params;
  j["measured"] = measured;
  j["bound"] = bound ? json(*bound) : json(nullptr);
  j["pass"] = pass;
  j["runtime_ms"] = runtime_ms;
  return j;
}

CheckRecord CheckRecord::from_json(const json& j) {
  CheckRecord r;
  r.check = j.at("check").get<std::string>();
  r.params = j.at("params");
  r.measured = j.at("measured").get<double>();
  if (!j.at("bound").is_null()) r.bound = j.at("bound").get<double>();
  r.pass = j.at("pass").get<bool>();
  r.runtime_ms = j.at("runtime_ms").get<std::int64_t>();
  return r;
}

std::vector<CheckRecord> run_suite(Suite suite, const RunConfig& config) {
  config.validate();
  Recorder rec;
  auto want = [&](Suite s) { return suite == Suite::all || suite == s; };
  if (want(Suite::bessel)) suite_bessel(config, rec);
  if (want(Suite::schur)) suite_schur(config, rec);
  if (want(Suite::model)) suite_model(config, rec);
  if (want(Suite::parametrix)) suite_parametrix(config, rec);
  if (want(Suite::gb)) suite_gb(config, rec);
  if (want(Suite::scales)) suite_scales(config, rec);
  if (want(Suite::witt)) suite_witt(config, rec);
  auto& out = rec.out;
  std::stable_sort(out.begin(), out.end(), [](const CheckRecord& a, const CheckRecord& b) {
    if (a.check != b.check) return a.check < b.check;
    return a.param_string() < b.param_string();
  });
  return out;
}

std::string emit(const std::vector<CheckRecord>& records, OutputFormat format) {
  if (records.empty()) throw PreconditionError("emit: no records");
  if (format == OutputFormat::json) {
    json a = json::array();
    for (const auto& r : records) a.push_back(r.to_json());
    return a.dump(2) + "\n";
  }
  std::string s = "check,param_string,measured,bound,pass,runtime_ms\n";
  for (const auto& r : records) {
    s += csv_field(r.check) + "," + csv_field(r.param_string()) + "," + fmt12(r.measured) + "," +
         (r.bound ? fmt12(*r.bound) : std::string()) + "," + (r.pass ? "true" : "false") + "," +
         std::to_string(r.runtime_ms) + "\n";
  }
  return s;
}

std::vector<CheckRecord> parse_json_records(const std::string& text) {
  json a = json::parse(text);
  if (!a.is_array()) throw InputError("parse_json_records: expected an array");
  std::vector<CheckRecord> out;
  for (const auto& j : a) out.push_back(CheckRecord::from_json(j));
  return out;
}

int exit_status(const std::vector<CheckRecord>& records) {
  for (const auto& r : records)
    if (!r.pass) return 1;
  return 0;
}

}  // namespace edgespec::harness
