#include <boost/version.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "warplab/warplab.hpp"

using namespace warplab;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Grid {
  double ln_lo = 0.0;
  double ln_hi = 0.0;
  int count = 0;
};

struct RunConfig {
  Json raw;
  std::string kind;
  int n = 2;
  double gamma = 1.0;
  int n_stages = 0;
  Wide schedule_cap;
  Grid radius{0.0, std::log(1e6), 60};
  Grid eps{std::log(0.02), std::log(0.2), 8};
  Grid profile{0.0, std::log(20.0), 40};
  int angle_count = 24;
  double tail_fraction = 0.5;
  double ray_tol = 0.1;
  double scales_k = 1.5, scales_l = 3.0, scales_step = 0.05;
  double trace_lo = 1.0, trace_hi = 100.0, trace_dx = 0.05;
  double sample_ln_r = 0.0, sample_R = 1.0;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = ".";
};

const Json* find(const Json& j, const char* key) {
  if (!j.is_object()) throw ParseError("expected an object");
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double get_double(const Json& j, const char* key, double fallback) {
  const Json* v = find(j, key);
  return v ? literal_double(*v) : fallback;
}

long long get_int(const Json& j, const char* key, long long fallback) {
  const Json* v = find(j, key);
  return v ? literal_int(*v) : fallback;
}

double get_log(const Json& j, const char* key, double fallback) {
  const Json* v = find(j, key);
  return v ? parse_log_decimal(literal_text(*v)) : fallback;
}

Grid get_grid(const Json& j, const char* key, Grid fallback) {
  const Json* g = find(j, key);
  if (!g) return fallback;
  Grid out{get_log(*g, "lo", fallback.ln_lo), get_log(*g, "hi", fallback.ln_hi),
           static_cast<int>(get_int(*g, "count", fallback.count))};
  if (out.count < 1) throw ParseError(std::string("grid '") + key + "' needs count >= 1");
  return out;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw ParseError(std::string(what) + " must be positive");
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  c.raw = parse_json_literal(text);
  const Json* m = find(c.raw, "manifold");
  if (!m) throw ParseError("config needs a 'manifold' object");
  const Json* kind = find(*m, "kind");
  if (!kind || !kind->is_string()) throw ParseError("manifold needs a 'kind' string");
  c.kind = kind->get<std::string>();
  c.n = static_cast<int>(get_int(*m, "n", 2));
  if (c.n < 2) throw ParseError("n must be >= 2");
  if (c.kind == "power") {
    c.gamma = get_double(*m, "gamma", 0.5);
    if (!(c.gamma > 0.0 && c.gamma <= 1.0)) throw ParseError("gamma must lie in (0, 1]");
  } else if (c.kind == "oscillating") {
    c.n_stages = static_cast<int>(get_int(*m, "n_stages", 3));
    const Json* cap = find(*m, "schedule_cap");
    if (!cap) throw ParseError("oscillating manifold needs 'schedule_cap'");
    try {
      c.schedule_cap = parse_wide(literal_text(*cap));
    } catch (const DomainError& e) {
      throw ParseError(e.what());
    }
  } else if (c.kind != "euclidean") {
    throw ParseError("unknown manifold kind '" + c.kind + "'");
  }

  if (const Json* g = find(c.raw, "grids")) {
    c.radius = get_grid(*g, "radius", c.radius);
    c.eps = get_grid(*g, "eps", c.eps);
    c.profile = get_grid(*g, "profile", c.profile);
    if (const Json* a = find(*g, "angle"))
      c.angle_count = static_cast<int>(get_int(*a, "count", c.angle_count));
    if (c.angle_count < 1) throw ParseError("angle count must be >= 1");
  }
  if (const Json* t = find(c.raw, "tolerances")) {
    c.tail_fraction = get_double(*t, "tail_fraction", c.tail_fraction);
    c.ray_tol = get_double(*t, "ray", c.ray_tol);
    require_positive(c.tail_fraction, "tail_fraction");
    require_positive(c.ray_tol, "ray tolerance");
  }
  if (const Json* s = find(c.raw, "scales")) {
    c.scales_k = get_double(*s, "k", c.scales_k);
    c.scales_l = get_double(*s, "l", c.scales_l);
    c.scales_step = get_double(*s, "step", c.scales_step);
    c.trace_lo = get_double(*s, "x_lo", c.trace_lo);
    c.trace_hi = get_double(*s, "x_hi", c.trace_hi);
    c.trace_dx = get_double(*s, "dx", c.trace_dx);
    require_positive(c.scales_step, "scales step");
    require_positive(c.trace_dx, "trace dx");
  }
  if (const Json* s = find(c.raw, "sample")) {
    c.sample_ln_r = get_log(*s, "r", c.sample_ln_r);
    c.sample_R = get_double(*s, "R", c.sample_R);
    require_positive(c.sample_R, "sample R");
  }
  const long long seed = get_int(c.raw, "seed", 0);
  if (seed < 0) throw ParseError("seed must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  if (const Json* o = find(c.raw, "output_dir")) {
    if (!o->is_string()) throw ParseError("output_dir must be a string");
    c.output_dir = o->get<std::string>();
  }
  return c;
}

WarpFunction make_warp(const RunConfig& c) {
  if (c.kind == "euclidean") return euclidean_warp();
  if (c.kind == "power") return power_warp(c.gamma);
  return build_oscillating_warp(c.n_stages, c.schedule_cap);
}

std::vector<Radius> radius_grid(const Grid& g) { return log_grid(g.ln_lo, g.ln_hi, g.count); }

std::vector<double> double_grid(const Grid& g) {
  std::vector<double> out;
  for (const auto& r : radius_grid(g)) {
    if (!r.fits_double()) throw DomainError("grid value exceeds double range");
    out.push_back(r.value());
  }
  return out;
}

class Runner {
 public:
  explicit Runner(const RunConfig& c) : c_(c) {}

  int run(const std::string& command) {
    std::filesystem::create_directories(c_.output_dir);
    const auto start = std::chrono::steady_clock::now();
    int status = 0;
    if (command == "build-warp") {
      emit("warp.json", warp_to_json(make_warp(c_)));
    } else if (command == "volume-curve") {
      emit("volume.csv", growth_curve_csv(growth_curve(manifold(), radius_grid(c_.radius))));
    } else if (command == "growth-orders") {
      growth_orders();
    } else if (command == "slope-scales") {
      const auto trace = log_volume_trace(manifold(), c_.trace_lo, c_.trace_hi, c_.trace_dx);
      emit("slope_scales.csv",
           slope_scales_csv(slope_scales(trace, c_.scales_k, c_.scales_l, c_.scales_step)));
    } else if (command == "profile") {
      emit("profile.csv", profile_csv(renormalized_profile(
                              manifold(), Radius::from_log(c_.sample_ln_r), double_grid(c_.profile))));
    } else if (command == "capacity") {
      const auto s = sample();
      const auto est = upper_box_dimension(s, std::exp(c_.eps.ln_lo), std::exp(c_.eps.ln_hi),
                                           c_.eps.count, c_.seed);
      emit("capacity.csv", capacity_csv(est));
      emit("capacity.json", capacity_json(est));
    } else if (command == "cone-sample") {
      const auto s = sample();
      emit("points.csv", points_csv(s));
      emit("dist.csv", dist_csv(s));
    } else if (command == "diam-ratio") {
      std::string out = "R,ratio\n";
      for (const auto& p : diameter_ratio_curve(manifold(), double_grid(c_.radius)))
        out += format_double(p.R) + ',' + format_double(p.ratio) + '\n';
      emit("diam_ratio.csv", out);
    } else if (command == "validate") {
      status = validate_all();
    } else {
      throw ParseError("unknown command '" + command + "'");
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_meta(command, secs, status);
    return status;
  }

 private:
  const RotSymManifold& manifold() {
    if (!m_) m_ = RotSymManifold::create(c_.n, make_warp(c_));
    return *m_;
  }

  MetricSample sample() {
    return sample_rescaled_ball(manifold(), Radius::from_log(c_.sample_ln_r), c_.sample_R,
                                c_.angle_count, c_.angle_count);
  }

  void emit(const std::string& name, const std::string& text) {
    write_file((c_.output_dir / name).string(), text);
  }

  void growth_orders() {
    const auto curve = growth_curve(manifold(), radius_grid(c_.radius));
    emit("growth.csv", growth_curve_csv(curve));
    const auto r = estimate_iv_sv(curve, c_.tail_fraction);
    Json j;
    j["tail_min"] = r.iv;
    j["tail_max"] = r.sv;
    j["tail_count"] = r.tail_count;
    emit("orders.json", j.dump(2) + "\n");
  }

  int validate_all() {
    const auto& M = manifold();
    const auto grid = radius_grid(c_.radius);
    Json j;
    const auto inv = validate(M.warp());
    j["invariants"] = inv.violations;
    j["max_continuity_residual"] = inv.max_continuity_residual;
    const double bishop = check_bishop(M, grid);
    const double yau = check_yau_linear(M, grid);
    const auto bg = check_bishop_gromov(M, grid);
    j["bishop_ratio"] = bishop;
    j["yau_linear_min"] = yau;
    j["bishop_gromov_passed"] = bg.passed;
    j["bishop_gromov_worst_increase"] = bg.worst_increase;

    // 10^3 log-spaced interior radii for the curvature scan
    const double top = std::min(M.log_t_max(), c_.radius.ln_hi) - 1e-9;
    double worst = kInf;
    for (const auto& t : log_grid(std::log(1e-3), top, 1000)) {
      const auto k = curvature_range(M.warp(), t);
      worst = std::min({worst, k.low, k.high});
    }
    j["curvature_min"] = worst;

    const bool ok = inv.ok() && bishop <= 1.0 + 1e-9 && yau > 0.0 && bg.passed && worst >= -1e-9;
    j["passed"] = ok;
    emit("validate.json", j.dump(2) + "\n");
    return ok ? 0 : 1;
  }

  void write_meta(const std::string& command, double secs, int status) {
    Json meta;
    meta["command"] = command;
    meta["config"] = c_.raw;
    meta["exit_status"] = status;
    meta["versions"] = {{"warplab", kVersion},
                        {"boost", BOOST_LIB_VERSION},
                        {"compiler", __VERSION__}};
    meta["wall_time_s"] = secs;
    emit("meta.json", meta.dump(2) + "\n");
  }

  const RunConfig& c_;
  std::optional<RotSymManifold> m_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volume growth and tangent-cone experiments on rotationally symmetric manifolds"};
  std::string config_path, command;
  app.add_option("config", config_path, "JSON run configuration")->required();
  app.add_option("--command", command, "build-warp, volume-curve, growth-orders, slope-scales, "
                                       "profile, capacity, cone-sample, diam-ratio or validate")
      ->required();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const RunConfig config = parse_config(read_file(config_path));
    return Runner(config).run(command);
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
