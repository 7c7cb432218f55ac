// Copyright 2026 The lsgauss Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lsgauss/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string_view>

#include "lsgauss/error.hpp"
#include "lsgauss/parallel.hpp"

namespace lsg {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
  fail(ErrorCode::ConfigError, "key '" + key + "': cannot use value '" + value + "' (" + why + ")");
}

double parse_plain_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty()) bad_value(key, text, "expected a number");
  return v;
}

// Numbers, fractions "a/b" and multiples of pi ("6pi", "6*pi", "pi").
double parse_number(const std::string& key, const std::string& raw) {
  std::string text = trim(raw);
  double factor = 1.0;
  if (text.size() >= 2 && text.compare(text.size() - 2, 2, "pi") == 0) {
    factor = std::numbers::pi;
    text = trim(text.substr(0, text.size() - 2));
    if (!text.empty() && text.back() == '*') text = trim(text.substr(0, text.size() - 1));
    if (text.empty()) text = "1";
  }
  double v = 0.0;
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    const double num = parse_plain_double(key, trim(text.substr(0, slash)));
    const double den = parse_plain_double(key, trim(text.substr(slash + 1)));
    if (den == 0.0) bad_value(key, raw, "division by zero");
    v = num / den;
  } else {
    v = parse_plain_double(key, text);
  }
  v *= factor;
  if (!std::isfinite(v)) bad_value(key, raw, "not finite");
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& raw) {
  const double v = parse_number(key, raw);
  if (v < 0.0 || v != std::floor(v) || v > 1e15) bad_value(key, raw, "expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

std::uint64_t parse_u64(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    bad_value(key, raw, "expected an unsigned 64-bit integer");
  return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, raw, "expected true or false");
}

// "a,b,c" or "start:step:stop".
std::vector<double> parse_grid(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  if (raw.find(':') != std::string::npos) {
    const auto parts = split(raw, ':');
    if (parts.size() != 3) bad_value(key, raw, "range must be start:step:stop");
    const double a = parse_number(key, parts[0]);
    const double step = parse_number(key, parts[1]);
    const double b = parse_number(key, parts[2]);
    if (step <= 0.0 || b < a) bad_value(key, raw, "range needs step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    if (count > 100000) bad_value(key, raw, "range too long");
    for (std::size_t i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
  }
  for (const auto& item : split(raw, ',')) out.push_back(parse_number(key, item));
  if (out.empty()) bad_value(key, raw, "empty list");
  return out;
}

const char* model_name(ModelKind k) {
  switch (k) {
    case ModelKind::ExpSineShift: return "exp_sine_shift";
    case ModelKind::HeteroskedasticSine: return "heteroskedastic_sine";
    case ModelKind::TvAr1: return "tv_ar1";
  }
  return "unknown";
}

template <class T>
std::string list_text(const std::vector<T>& v) {
  std::ostringstream s;
  s << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  return s.str();
}

struct KeyInfo {
  const char* section;
  const char* key;
};

constexpr KeyInfo kKeys[] = {
    {"procgen", "kind"},        {"procgen", "d"},          {"procgen", "mu"},
    {"procgen", "base"},        {"procgen", "amplitude"},  {"procgen", "frequency"},
    {"procgen", "phi"},         {"procgen", "phi_amplitude"}, {"procgen", "h_coef"},
    {"procgen", "noise"},       {"sumproc", "k_n_exponent"}, {"sumproc", "c_floor"},
    {"sumproc", "clip_variant"}, {"gausslim", "cv_reps"},  {"gausslim", "cv_grid_n"},
    {"gausslim", "curve"},      {"rates", "beta"},         {"rates", "q"},
    {"rates", "mc_reps"},       {"rates", "max_lag"},      {"rates", "coupling_ladder"},
    {"rates", "coupling_reps"}, {"rates", "diag_n"},       {"rates", "h_report"},
    {"harness", "n"},           {"harness", "reps"},       {"harness", "alpha"},
    {"harness", "mu_grid"},     {"harness", "statistics"}, {"harness", "base_seed"},
    {"harness", "threads"},     {"harness", "output_path"},
};

std::string qualify(const std::string& key) {
  if (key.find('.') != std::string::npos) return key;
  for (const KeyInfo& k : kKeys)
    if (key == k.key) return std::string(k.section) + "." + k.key;
  fail(ErrorCode::ConfigError, "unknown key '" + key + "'");
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const std::filesystem::path p(path);
  const std::string ext = p.has_extension() ? p.extension().string() : ".csv";
  return (p.parent_path() / (p.stem().string() + suffix + ext)).string();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::IoError, "cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const KeyInfo& k : kKeys) keys.push_back(std::string(k.section) + "." + k.key);
  return keys;
}

void set_config_value(ExperimentConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = qualify(trim(raw_key));
  const std::string value = trim(raw_value);
  if (key == "procgen.kind") {
    if (value == "exp_sine_shift") cfg.kind = ModelKind::ExpSineShift;
    else if (value == "heteroskedastic_sine") cfg.kind = ModelKind::HeteroskedasticSine;
    else if (value == "tv_ar1") cfg.kind = ModelKind::TvAr1;
    else bad_value(key, value, "expected exp_sine_shift, heteroskedastic_sine or tv_ar1");
  } else if (key == "procgen.d") {
    cfg.dim = parse_count(key, value);
  } else if (key == "procgen.mu") {
    cfg.mu = parse_number(key, value);
  } else if (key == "procgen.base") {
    cfg.base = parse_number(key, value);
  } else if (key == "procgen.amplitude") {
    cfg.amplitude = parse_number(key, value);
  } else if (key == "procgen.frequency") {
    cfg.frequency = parse_number(key, value);
  } else if (key == "procgen.phi") {
    cfg.phi = parse_number(key, value);
  } else if (key == "procgen.phi_amplitude") {
    cfg.phi_amplitude = parse_number(key, value);
  } else if (key == "procgen.h_coef") {
    cfg.h_coef = parse_count(key, value);
  } else if (key == "procgen.noise") {
    if (value == "centered_exp") cfg.noise = NoiseKind::CenteredExp;
    else if (value == "gaussian") cfg.noise = NoiseKind::Gaussian;
    else bad_value(key, value, "expected centered_exp or gaussian");
  } else if (key == "sumproc.k_n_exponent") {
    cfg.k_n_exponent = parse_number(key, value);
  } else if (key == "sumproc.c_floor") {
    cfg.c_floor = parse_number(key, value);
  } else if (key == "sumproc.clip_variant") {
    cfg.clip_variant = parse_bool(key, value);
  } else if (key == "gausslim.cv_reps") {
    cfg.cv_reps = parse_count(key, value);
  } else if (key == "gausslim.cv_grid_n") {
    cfg.cv_grid_n = parse_count(key, value);
  } else if (key == "gausslim.curve") {
    if (value == "standard") cfg.curve = CurveKind::Standard;
    else if (value == "model") cfg.curve = CurveKind::Model;
    else bad_value(key, value, "expected standard or model");
  } else if (key == "rates.beta") {
    cfg.beta = parse_number(key, value);
  } else if (key == "rates.q") {
    cfg.q = parse_number(key, value);
  } else if (key == "rates.mc_reps") {
    cfg.mc_reps = parse_count(key, value);
  } else if (key == "rates.max_lag") {
    cfg.max_lag = parse_count(key, value);
  } else if (key == "rates.coupling_ladder") {
    std::vector<std::size_t> ladder;
    for (const auto& item : split(value, ',')) ladder.push_back(parse_count(key, item));
    cfg.coupling_ladder = ladder;
  } else if (key == "rates.coupling_reps") {
    cfg.coupling_reps = parse_count(key, value);
  } else if (key == "rates.diag_n") {
    cfg.diag_n = parse_count(key, value);
  } else if (key == "rates.h_report") {
    cfg.h_report = parse_count(key, value);
  } else if (key == "harness.n") {
    cfg.n = parse_count(key, value);
  } else if (key == "harness.reps") {
    cfg.reps = parse_count(key, value);
  } else if (key == "harness.alpha") {
    cfg.alpha = parse_number(key, value);
  } else if (key == "harness.mu_grid") {
    cfg.mu_grid = parse_grid(key, value);
  } else if (key == "harness.statistics") {
    std::vector<StatisticKind> kinds;
    for (const auto& item : split(value, ',')) {
      if (item == "plain") kinds.push_back(StatisticKind::Plain);
      else if (item == "studentized") kinds.push_back(StatisticKind::Studentized);
      else bad_value(key, value, "expected a list of plain, studentized");
    }
    if (kinds.empty()) bad_value(key, value, "empty list");
    cfg.statistics = kinds;
  } else if (key == "harness.base_seed") {
    cfg.base_seed = parse_u64(key, value);
  } else if (key == "harness.threads") {
    cfg.threads = static_cast<unsigned>(parse_count(key, value));
  } else if (key == "harness.output_path") {
    if (value.empty()) bad_value(key, value, "empty path");
    cfg.output_path = value;
  } else {
    fail(ErrorCode::ConfigError, "unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig cfg;
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') fail(ErrorCode::ConfigError, where + "unterminated section header");
      section = trim(text.substr(1, text.size() - 2));
      const bool known = std::any_of(std::begin(kKeys), std::end(kKeys),
                                     [&](const KeyInfo& k) { return section == k.section; });
      if (!known) fail(ErrorCode::ConfigError, where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) fail(ErrorCode::ConfigError, where + "expected 'key = value'");
    if (section.empty()) fail(ErrorCode::ConfigError, where + "key outside of a [section]");
    const std::string key = trim(text.substr(0, eq));
    const bool known = std::any_of(std::begin(kKeys), std::end(kKeys), [&](const KeyInfo& k) {
      return section == k.section && key == k.key;
    });
    if (!known) fail(ErrorCode::ConfigError, where + "unknown key '" + key + "' in [" + section + "]");
    try {
      set_config_value(cfg, section + "." + key, text.substr(eq + 1));
    } catch (const Error& e) {
      fail(ErrorCode::ConfigError, where + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::ConfigError, "cannot open config file '" + path + "'");
  return parse_config(in, path);
}

std::size_t ExperimentConfig::k_n() const {
  return static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), k_n_exponent)));
}

GeneratorSpec ExperimentConfig::make_spec() const {
  const InnovationLaw law =
      noise == NoiseKind::Gaussian ? InnovationLaw::standard_gaussian(dim) : InnovationLaw::centered_exp_one();
  GeneratorSpec spec;
  switch (kind) {
    case ModelKind::ExpSineShift: {
      spec = GeneratorSpec::exp_sine_shift(mu);
      auto& m = std::get<ExpSineShift>(spec.model);
      m.base = base;
      m.amplitude = amplitude;
      m.frequency = frequency;
      spec.noise = law;
      break;
    }
    case ModelKind::HeteroskedasticSine:
      spec = GeneratorSpec::heteroskedastic_sine(dim, base, amplitude, frequency, law);
      break;
    case ModelKind::TvAr1:
      spec = GeneratorSpec::tv_ar1(dim, phi, h_coef, law, phi_amplitude, frequency);
      break;
  }
  spec.validate();
  return spec;
}

void ExperimentConfig::validate(bool allow_median) const {
  auto check = [](bool ok, const std::string& what) { require(ok, ErrorCode::ConfigError, what); };
  check(n >= 2, "harness.n must be at least 2");
  check(reps >= 1, "harness.reps must be at least 1");
  check(alpha > 0.0 && (alpha < 0.5 || (allow_median && alpha == 0.5)), "harness.alpha must lie in (0, 0.5)");
  check(!mu_grid.empty(), "harness.mu_grid must not be empty");
  for (double m : mu_grid) check(std::isfinite(m), "harness.mu_grid values must be finite");
  check(!statistics.empty(), "harness.statistics must not be empty");
  check(std::isfinite(k_n_exponent) && k_n_exponent > 0.0 && k_n_exponent < 1.0,
        "sumproc.k_n_exponent must lie in (0, 1)");
  const std::size_t k = k_n();
  check(k >= 1 && k < n, "k_n = floor(n^k_n_exponent) = " + std::to_string(k) + " must satisfy 1 <= k_n < n");
  check(std::isfinite(c_floor) && c_floor > 0.0, "sumproc.c_floor must be positive");
  check(cv_reps >= 1000, "gausslim.cv_reps must be at least 1000");
  check(effective_cv_grid() >= 100, "gausslim.cv_grid_n must be at least 100");
  check(dim >= 1 && dim <= kMaxDim, "procgen.d must lie in [1, 64]");
  check(std::isfinite(beta) && beta > 1.0, "rates.beta must exceed 1");
  check(std::isfinite(q) && q > 2.0, "rates.q must exceed 2");
  check(mc_reps >= 100, "rates.mc_reps must be at least 100");
  check(coupling_reps >= 100, "rates.coupling_reps must be at least 100");
  check(!coupling_ladder.empty(), "rates.coupling_ladder must not be empty");
  for (std::size_t v : coupling_ladder) check(v >= 100, "rates.coupling_ladder entries must be at least 100");
  check(h_report >= 1, "rates.h_report must be at least 1");
  check(max_lag >= 2 && 4 * max_lag < diag_n, "rates.max_lag must satisfy 2 <= max_lag < diag_n / 4");
  check(threads <= 1024, "harness.threads must be at most 1024");
  try {
    make_spec();
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, std::string("[procgen] ") + e.what());
  }
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "procgen.kind = " << model_name(kind) << '\n'
    << "procgen.d = " << dim << '\n'
    << "procgen.mu = " << mu << '\n'
    << "procgen.base = " << base << '\n'
    << "procgen.amplitude = " << amplitude << '\n'
    << "procgen.frequency = " << frequency << '\n'
    << "procgen.phi = " << phi << '\n'
    << "procgen.phi_amplitude = " << phi_amplitude << '\n'
    << "procgen.h_coef = " << h_coef << '\n'
    << "procgen.noise = " << (noise == NoiseKind::Gaussian ? "gaussian" : "centered_exp") << '\n'
    << "sumproc.k_n_exponent = " << k_n_exponent << '\n'
    << "sumproc.c_floor = " << c_floor << '\n'
    << "sumproc.clip_variant = " << (clip_variant ? "true" : "false") << '\n'
    << "gausslim.cv_reps = " << cv_reps << '\n'
    << "gausslim.cv_grid_n = " << cv_grid_n << '\n'
    << "gausslim.curve = " << (curve == CurveKind::Model ? "model" : "standard") << '\n'
    << "rates.beta = " << beta << '\n'
    << "rates.q = " << q << '\n'
    << "rates.mc_reps = " << mc_reps << '\n'
    << "rates.max_lag = " << max_lag << '\n'
    << "rates.coupling_ladder = " << list_text(coupling_ladder) << '\n'
    << "rates.coupling_reps = " << coupling_reps << '\n'
    << "rates.diag_n = " << diag_n << '\n'
    << "rates.h_report = " << h_report << '\n'
    << "harness.n = " << n << '\n'
    << "harness.reps = " << reps << '\n'
    << "harness.alpha = " << alpha << '\n'
    << "harness.mu_grid = " << list_text(mu_grid) << '\n'
    << "harness.statistics = ";
  for (std::size_t i = 0; i < statistics.size(); ++i) s << (i ? "," : "") << to_string(statistics[i]);
  // Threads and output path do not affect results and stay out of the digest.
  s << '\n' << "harness.base_seed = " << base_seed << '\n';
  return s.str();
}

std::string get_config_value(const ExperimentConfig& cfg, const std::string& raw_key) {
  const std::string key = qualify(trim(raw_key));
  if (key == "harness.threads") return std::to_string(cfg.threads);
  if (key == "harness.output_path") return cfg.output_path;
  std::istringstream lines(cfg.canonical());
  const std::string prefix = key + " = ";
  for (std::string line; std::getline(lines, line);)
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  fail(ErrorCode::ConfigError, "unknown key '" + key + "'");
}

std::uint64_t ExperimentConfig::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fresh_output_path(const std::string& path) {
  if (!std::filesystem::exists(path)) return path;
  const std::filesystem::path p(path);
  for (int i = 1; i < 100000; ++i) {
    const auto candidate = p.parent_path() / (p.stem().string() + "." + std::to_string(i) + p.extension().string());
    if (!std::filesystem::exists(candidate)) return candidate.string();
  }
  fail(ErrorCode::IoError, "no free output name next to '" + path + "'");
}

// ---------------------------------------------------------------------------
// Power table
// ---------------------------------------------------------------------------

const PowerRow* MonteCarloReport::find(double mu, StatisticKind kind) const {
  for (const PowerRow& r : rows)
    if (r.statistic == kind && std::abs(r.mu - mu) < 1e-12) return &r;
  return nullptr;
}

MonteCarloReport run_power_table(const ExperimentConfig& cfg, bool write) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const GeneratorSpec spec = cfg.make_spec();
  const std::size_t n = cfg.n, d = spec.dim();
  const std::size_t grid = cfg.effective_cv_grid();

  std::vector<QuantileEstimate> cvs;
  for (StatisticKind kind : cfg.statistics) {
    const CovarianceCurve curve = kind == StatisticKind::Plain ? CovarianceCurve::from_spec(spec, grid + 1)
                                                               : CovarianceCurve::standard(d);
    cvs.push_back(critical_value(curve, cfg.alpha, cfg.cv_reps, grid, cfg.base_seed, cfg.threads));
  }

  const PathSimulator sim(spec, n);
  const StudentizeOptions stud{cfg.k_n(), cfg.c_floor, cfg.clip_variant};
  const std::size_t cells = cfg.mu_grid.size() * cfg.statistics.size();
  std::vector<std::uint8_t> reject(cfg.reps * cells, 0);
  parallel_for(cfg.reps, cfg.threads, [&](std::size_t r0, std::size_t r1) {
    std::vector<double> path(n * d);
    for (std::size_t r = r0; r < r1; ++r) {
      sim.simulate_centered(cfg.base_seed, r, path);
      const PathView view{path, n, d};
      std::uint8_t* out = reject.data() + r * cells;
      for (std::size_t m = 0; m < cfg.mu_grid.size(); ++m) {
        for (std::size_t s = 0; s < cfg.statistics.size(); ++s) {
          const double mu = cfg.mu_grid[m];
          const double stat = cfg.statistics[s] == StatisticKind::Plain ? sup_partial_sum(view, mu)
                                                                        : sup_studentized(view, stud, mu);
          out[m * cfg.statistics.size() + s] = stat > cvs[s].value ? 1 : 0;
        }
      }
    }
  });

  MonteCarloReport report;
  report.config_digest = cfg.digest();
  const double reps = static_cast<double>(cfg.reps);
  for (std::size_t m = 0; m < cfg.mu_grid.size(); ++m) {
    for (std::size_t s = 0; s < cfg.statistics.size(); ++s) {
      std::size_t count = 0;
      for (std::size_t r = 0; r < cfg.reps; ++r) count += reject[r * cells + m * cfg.statistics.size() + s];
      PowerRow row;
      row.mu = cfg.mu_grid[m];
      row.statistic = cfg.statistics[s];
      row.power = static_cast<double>(count) / reps;
      row.reps = cfg.reps;
      row.n = n;
      row.critical_value = cvs[s].value;
      row.cv_stderr = cvs[s].std_error;
      row.binom_stderr = std::sqrt(row.power * (1.0 - row.power) / reps);
      row.base_seed = cfg.base_seed;
      report.rows.push_back(row);
    }
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (write) {
    report.written_path = fresh_output_path(cfg.output_path);
    auto out = open_output(report.written_path);
    write_csv(out, report);
  }
  return report;
}

void write_csv(std::ostream& out, const MonteCarloReport& report) {
  out << "mu,statistic,power,reps,n,critical_value,cv_stderr,binom_stderr,base_seed,config_digest\n"
      << std::setprecision(6);
  for (const PowerRow& r : report.rows) {
    out << r.mu << ',' << to_string(r.statistic) << ',' << r.power << ',' << r.reps << ',' << r.n << ','
        << r.critical_value << ',' << r.cv_stderr << ',' << r.binom_stderr << ',' << r.base_seed << ','
        << std::hex << report.config_digest << std::dec << '\n';
  }
  require(static_cast<bool>(out), ErrorCode::IoError, "failed writing power CSV");
}

// ---------------------------------------------------------------------------
// Critical value
// ---------------------------------------------------------------------------

QuantileEstimate run_critical_value(const ExperimentConfig& cfg, bool write, std::string* written_path) {
  cfg.validate(true);
  const GeneratorSpec spec = cfg.make_spec();
  const std::size_t grid = cfg.effective_cv_grid();
  const CovarianceCurve curve = cfg.curve == CurveKind::Model ? CovarianceCurve::from_spec(spec, grid + 1)
                                                              : CovarianceCurve::standard(spec.dim());
  const QuantileEstimate q = critical_value(curve, cfg.alpha, cfg.cv_reps, grid, cfg.base_seed, cfg.threads);
  if (write) {
    const std::string path = fresh_output_path(cfg.output_path);
    auto out = open_output(path);
    write_csv(out, std::span<const QuantileEstimate>(&q, 1));
    if (written_path) *written_path = path;
  }
  return q;
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

DiagnosticsResult run_diagnostics(const ExperimentConfig& cfg, bool write) {
  cfg.validate();
  const GeneratorSpec spec = cfg.make_spec();
  DiagnosticsResult res;

  RegularityOptions reg;
  reg.beta = cfg.beta;
  reg.dependence.mc_reps = cfg.mc_reps;
  reg.dependence.seed = cfg.base_seed;
  res.regularity = regularity_report(spec, cfg.diag_n, cfg.q, cfg.h_report, reg);
  // Decay at least as fast as the assumed polynomial rate.
  res.regularity_pass = std::isfinite(res.regularity.theta) &&
                        (res.regularity.super_polynomial || res.regularity.beta_fit >= cfg.beta - 0.25);

  AutocovOptions ao;
  ao.mc_reps = cfg.mc_reps;
  ao.max_lag = cfg.max_lag;
  ao.seed = cfg.base_seed;
  ao.threads = cfg.threads;
  res.autocov = autocov_decay_check(spec, cfg.diag_n, cfg.beta, ao);

  CouplingOptions co;
  co.reps = cfg.coupling_reps;
  co.seed = cfg.base_seed;
  co.threads = cfg.threads;
  co.alpha = cfg.alpha;
  res.coupling = coupling_diagnostic(spec, cfg.coupling_ladder, co);
  // Distances at the noise floor fluctuate; only an increase beyond one null
  // quantile counts against the ladder here.
  const double tolerance = ks_two_sample_critical(cfg.coupling_reps, cfg.coupling_reps, cfg.alpha);
  res.coupling_pass = true;
  for (std::size_t i = 0; i < res.coupling.rows.size(); ++i) {
    res.coupling_pass = res.coupling_pass && res.coupling.rows[i].pass;
    if (i > 0 && res.coupling.rows[i].ks_terminal > res.coupling.rows[i - 1].ks_terminal + tolerance)
      res.coupling_pass = false;
  }
  res.all_pass = res.regularity_pass && res.autocov.pass && res.coupling_pass;

  if (write) {
    const std::string reg_path = fresh_output_path(with_suffix(cfg.output_path, "_regularity"));
    {
      auto out = open_output(reg_path);
      const RegularityReport& r = res.regularity;
      out << "h,delta,xi_tail,theta,gamma,variation,beta_fit,super_polynomial,pass\n" << std::setprecision(6);
      for (std::size_t h = 0; h < r.delta_curve.size(); ++h) {
        out << h << ',' << r.delta_curve[h] << ',' << r.xi_tail[h] << ',' << r.theta << ',' << r.gamma << ','
            << r.variation << ',' << r.beta_fit << ',' << (r.super_polynomial ? 1 : 0) << ','
            << (res.regularity_pass ? 1 : 0) << '\n';
      }
    }
    const std::string ac_path = fresh_output_path(with_suffix(cfg.output_path, "_autocov"));
    {
      auto out = open_output(ac_path);
      write_csv(out, res.autocov);
    }
    const std::string cp_path = fresh_output_path(with_suffix(cfg.output_path, "_coupling"));
    {
      auto out = open_output(cp_path);
      write_csv(out, res.coupling);
    }
    res.written_paths = {reg_path, ac_path, cp_path};
  }
  return res;
}

// ---------------------------------------------------------------------------
// Sequential monitoring
// ---------------------------------------------------------------------------

SequentialResult run_sequential_demo(const ExperimentConfig& cfg, bool write) {
  cfg.validate();
  require(std::find(cfg.statistics.begin(), cfg.statistics.end(), StatisticKind::Studentized) !=
              cfg.statistics.end(),
          ErrorCode::ConfigError, "sequential monitoring needs 'studentized' in harness.statistics");
  const GeneratorSpec spec = cfg.make_spec();
  const std::size_t n = cfg.n, d = spec.dim();
  const StudentizeOptions stud{cfg.k_n(), cfg.c_floor, cfg.clip_variant};

  SequentialResult res;
  res.reps = cfg.reps;
  res.critical_value = critical_value(CovarianceCurve::standard(d), cfg.alpha, cfg.cv_reps,
                                      cfg.effective_cv_grid(), cfg.base_seed, cfg.threads)
                           .value;
  const PathSimulator sim(spec, n);

  // Traced path: replication 0. The multipliers go through the prefix-only
  // builder, so step t can only see X_1..X_{t-1}.
  PathMatrix path = sim.simulate(cfg.base_seed, 0);
  for (double& v : path.values) v += cfg.mu - spec.mean_shift();
  const MultiplierSequence g = studentizing_multipliers(path, stud);
  const PartialSumProcess proc = multiplier_partial_sum(path, g);

  std::ostringstream trace;
  trace << "t,u,norm,critical_value,crossed,window_last\n" << std::setprecision(17);
  for (std::size_t t = 1; t <= n; ++t) {
    double sq = 0.0;
    for (double v : proc.row(t)) sq += v * v;
    const double norm = std::sqrt(sq);
    const bool crossed = norm > res.critical_value;
    if (crossed && !res.first_crossing) res.first_crossing = t;
    trace << t << ',' << static_cast<double>(t) / static_cast<double>(n) << ',' << norm << ','
          << res.critical_value << ',' << (crossed ? 1 : 0) << ',' << (t > stud.k_n ? t - g.lag() : 0) << '\n';
  }

  std::vector<std::uint8_t> crossed(cfg.reps, 0);
  parallel_for(cfg.reps, cfg.threads, [&](std::size_t r0, std::size_t r1) {
    std::vector<double> buf(n * d);
    for (std::size_t r = r0; r < r1; ++r) {
      sim.simulate_centered(cfg.base_seed, r, buf);
      crossed[r] = sup_studentized({buf, n, d}, stud, cfg.mu) > res.critical_value ? 1 : 0;
    }
  });
  std::size_t count = 0;
  for (std::uint8_t c : crossed) count += c;
  res.crossing_frequency = static_cast<double>(count) / static_cast<double>(cfg.reps);

  if (write) {
    res.written_path = fresh_output_path(cfg.output_path);
    auto out = open_output(res.written_path);
    out << trace.str();
    require(static_cast<bool>(out), ErrorCode::IoError, "failed writing sequential trace");
  }
  return res;
}

}  // namespace lsg
