#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>

#include "conleg/greeks.hpp"
#include "conleg/pricing.hpp"
#include "conleg/reference.hpp"
#include "model_io.hpp"

namespace conleg::cli {

namespace {

struct Config {
  std::string model_file;
  std::string payoff = "put";
  int power = 2;
  std::string style = "european";
  double S = 100.0;
  std::optional<double> K;
  std::string strike_range, spot_range;
  double T = 1.0, t = 0.0;
  int dates = 0;
  std::optional<double> barrier;
  double rebate = 0.0;
  std::string direction = "do";
  double Ln = 10.0;
  std::string output = "csv";
  bool oracle = false, plot_data = false;
  std::string out_file;
};

struct Table {
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
};

void add_options(CLI::App& app, Config& c) {
  app.add_option("--model-file", c.model_file, "JSON model descriptor")->required();
  app.add_option("--payoff", c.payoff, "payoff kind, e.g. put, call, cash_or_nothing_call");
  app.add_option("--power", c.power, "power n of the asymmetric payoffs");
  app.add_option("--style", c.style)->check(CLI::IsMember({"european", "bermudan", "american", "barrier"}));
  app.add_option("--S", c.S, "spot used with --strike-range");
  app.add_option("--K", c.K, "strike used with --spot-range and for barriers");
  app.add_option("--strike-range", c.strike_range, "lo:hi:n");
  app.add_option("--spot-range", c.spot_range, "lo:hi:n");
  app.add_option("--T", c.T, "maturity");
  app.add_option("--t", c.t, "valuation time");
  app.add_option("--dates", c.dates, "exercise or monitoring dates L; base level for american");
  app.add_option("--barrier", c.barrier);
  app.add_option("--rebate", c.rebate);
  app.add_option("--direction", c.direction)->check(CLI::IsMember({"do", "uo"}));
  app.add_option("--Ln", c.Ln, "truncation width in standard deviations");
  app.add_option("--output", c.output)->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--oracle", c.oracle, "add brute-force oracle and abs_err columns");
  app.add_flag("--plot-data", c.plot_data, "emit x,y pairs per curve");
  app.add_option("--out-file", c.out_file, "write here instead of stdout");
}

std::vector<double> parse_range(const std::string& s, const char* what) {
  const auto a = s.find(':'), b = s.rfind(':');
  if (a == std::string::npos || a == b) throw ParameterError(std::string(what) + ": expected lo:hi:n");
  double lo, hi;
  int n;
  try {
    std::size_t u, v, w;
    lo = std::stod(s.substr(0, a), &u);
    hi = std::stod(s.substr(a + 1, b - a - 1), &v);
    n = std::stoi(s.substr(b + 1), &w);
    if (u != a || v != b - a - 1 || w != s.size() - b - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ParameterError(std::string(what) + ": cannot parse '" + s + "'");
  }
  if (!(lo > 0.0) || !(hi >= lo) || n < 1 || n > 1000000)
    throw ParameterError(std::string(what) + ": need 0 < lo <= hi and n >= 1");
  std::vector<double> x;
  for (int j = 0; j < n; ++j) x.push_back(n == 1 ? lo : lo + (hi - lo) * j / (n - 1));
  return x;
}

PricingOptions options_from_env() {
  PricingOptions opt;
  if (const char* s = std::getenv("CONLEG_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0' || !(v > 0.0) || v > 1e-2) throw ParameterError("CONLEG_TOL must be in (0, 1e-2]");
    opt.tol = v;
    opt.density.tol = v;
  }
  return opt;
}

void write_csv(const Table& t, std::ostream& os) {
  for (std::size_t c = 0; c < t.names.size(); ++c) os << (c ? "," : "") << t.names[c];
  os << '\n';
  for (std::size_t r = 0; r < t.cols[0].size(); ++r) {
    for (std::size_t c = 0; c < t.cols.size(); ++c) os << (c ? "," : "") << format_number(t.cols[c][r]);
    os << '\n';
  }
}

nlohmann::ordered_json json_numbers(const std::vector<double>& v) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  // the same 12 digits the CSV carries
  for (double x : v) a.push_back(std::stod(format_number(x)));
  return a;
}

void write_json(const Table& t, std::ostream& os) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < t.names.size(); ++c) j[t.names[c]] = json_numbers(t.cols[c]);
  os << j.dump() << '\n';
}

// one x,y series per curve against whichever of strike or spot varies
void write_plot(const Table& t, bool by_spot, const std::string& fmt, std::ostream& os) {
  const std::vector<double>& x = t.cols[by_spot ? 1 : 0];
  if (fmt == "csv") {
    os << "curve,x,y\n";
    for (std::size_t c = 2; c < t.names.size(); ++c)
      for (std::size_t r = 0; r < x.size(); ++r)
        os << t.names[c] << ',' << format_number(x[r]) << ',' << format_number(t.cols[c][r]) << '\n';
    return;
  }
  nlohmann::ordered_json curves = nlohmann::ordered_json::array();
  for (std::size_t c = 2; c < t.names.size(); ++c)
    curves.push_back({{"name", t.names[c]}, {"x", json_numbers(x)}, {"y", json_numbers(t.cols[c])}});
  os << nlohmann::ordered_json{{"x_axis", by_spot ? "spot" : "strike"}, {"curves", curves}}.dump() << '\n';
}

Table compute(const Config& c, bool greeks) {
  const LevyModel model = load_model(c.model_file);
  const PayoffSpec spec{parse_payoff_kind(c.payoff), c.power};
  validate(spec);
  const MarketParams mk{c.S, model.r, model.q, c.t, c.T};
  validate(mk);
  const PricingOptions opt = options_from_env();

  if (!c.strike_range.empty() && !c.spot_range.empty())
    throw ParameterError("give either --strike-range or --spot-range, not both");
  std::vector<double> strikes, spots;
  if (!c.spot_range.empty()) {
    spots = parse_range(c.spot_range, "--spot-range");
    strikes.assign(spots.size(), c.K.value_or(c.S));
  } else {
    strikes = c.strike_range.empty() ? std::vector<double>{c.K.value_or(c.S)}
                                     : parse_range(c.strike_range, "--strike-range");
    spots.assign(strikes.size(), c.S);
  }
  if (greeks && c.style != "european") throw ParameterError("greeks are available for --style european only");

  ExerciseSchedule sch;
  BarrierSpec bs;
  PriceCurve pc;
  if (c.style == "european") {
    pc = price_european(model, spec, mk, c.Ln, opt);
  } else if (c.style == "bermudan") {
    if (c.dates < 1) throw ParameterError("--style bermudan needs --dates L >= 1");
    sch = ExerciseSchedule::uniform(c.t, c.T, c.dates);
    pc = price_bermudan(model, spec, mk, sch, c.Ln, opt);
  } else if (c.style == "american") {
    if (c.dates < 0) throw ParameterError("--dates must be nonnegative");
    pc = price_american(model, spec, mk, c.dates, c.Ln, opt);
  } else {
    if (!c.barrier) throw ParameterError("--style barrier needs --barrier B");
    if (c.dates < 1) throw ParameterError("--style barrier needs --dates L >= 1 monitoring dates");
    if (std::any_of(strikes.begin(), strikes.end(), [&](double k) { return k != strikes[0]; }))
      throw ParameterError("barrier curves hold for one strike; use --spot-range with --K");
    bs.B = *c.barrier;
    bs.rebate = c.rebate;
    bs.direction = c.direction == "uo" ? BarrierDirection::up_and_out : BarrierDirection::down_and_out;
    bs.schedule = ExerciseSchedule::uniform(c.t, c.T, c.dates);
    pc = price_barrier(model, spec, mk, strikes[0], bs, c.Ln, opt);
  }

  Table t;
  t.names = {"strike", "spot", "price"};
  t.cols = {strikes, spots, {}};
  for (std::size_t r = 0; r < strikes.size(); ++r) t.cols[2].push_back(pc.price_at_spot(spots[r], strikes[r]));
  if (greeks) {
    const GreekCurve d = delta(pc), g = gamma(pc);
    t.names.insert(t.names.end(), {"delta", "gamma"});
    t.cols.emplace_back();
    t.cols.emplace_back();
    for (std::size_t r = 0; r < strikes.size(); ++r) {
      t.cols[3].push_back(d.at_spot(spots[r], strikes[r]));
      t.cols[4].push_back(g.at_spot(spots[r], strikes[r]));
    }
  }
  if (c.oracle) {
    std::vector<double> xt, o;
    for (std::size_t r = 0; r < strikes.size(); ++r) xt.push_back(std::log(spots[r] / strikes[r]));
    const double p = strike_power(spec);
    if (c.style == "european") {
      for (std::size_t r = 0; r < strikes.size(); ++r) {
        MarketParams m = mk;
        m.S = spots[r];
        o.push_back(reference::quad_price_european(model, spec, m, strikes[r]));
      }
    } else {
      if (c.style == "bermudan")
        o = reference::quad_backward_induction(model, spec, mk, sch, xt);
      else if (c.style == "american")
        o = reference::dense_bermudan_fft(model, spec, mk, 512, xt);
      else
        o = reference::quad_backward_induction(model, spec, mk, strikes[0], bs, xt);
      for (std::size_t r = 0; r < o.size(); ++r) o[r] *= std::pow(strikes[r], p);
    }
    std::vector<double> e;
    for (std::size_t r = 0; r < o.size(); ++r) e.push_back(std::abs(t.cols[2][r] - o[r]));
    t.names.insert(t.names.end(), {"oracle", "abs_err"});
    t.cols.push_back(o);
    t.cols.push_back(e);
  }
  for (const auto& col : t.cols)
    for (double v : col)
      if (!std::isfinite(v)) throw NumericalError("non-finite value in the output");
  return t;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"spectral Levy option pricer"};
  app.require_subcommand(1);
  Config c;
  CLI::App* price = app.add_subcommand("price", "price curves");
  CLI::App* greeks = app.add_subcommand("greeks", "price, delta and gamma curves (european only)");
  add_options(*price, c);
  add_options(*greeks, c);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    const bool want_greeks = greeks->parsed();
    const Table t = compute(c, want_greeks);
    std::ofstream file;
    if (!c.out_file.empty()) {
      file.open(c.out_file);
      if (!file) throw ParameterError("cannot write " + c.out_file);
    }
    std::ostream& os = c.out_file.empty() ? out : file;
    if (c.plot_data)
      write_plot(t, !c.spot_range.empty(), c.output, os);
    else if (c.output == "json")
      write_json(t, os);
    else
      write_csv(t, os);
    return 0;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace conleg::cli
