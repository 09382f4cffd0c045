#include "hwsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hwsim {

namespace {

struct RawValue {
  std::string text;
  int line = 0;
};

using Section = std::map<std::string, RawValue>;
using RawConfig = std::map<std::string, Section>;

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void fail(const std::string& msg, int line) {
  throw ConfigError(msg + " (line " + std::to_string(line) + ")");
}

RawConfig parse_raw(const std::string& text) {
  RawConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("config: unterminated section header", lineno);
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) fail("config: empty section name", lineno);
      cfg[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail("config: expected key = value", lineno);
    if (section.empty()) fail("config: key outside any section", lineno);
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) fail("config: empty key", lineno);
    if (cfg[section].count(key)) fail("config: duplicate key '" + key + "'", lineno);
    cfg[section][key] = {val, lineno};
  }
  return cfg;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    // commas are decoration
    std::string clean;
    for (char c : tok)
      if (c != ',') clean += c;
    if (!clean.empty()) out.push_back(clean);
  }
  return out;
}

std::vector<std::string> split_groups(const std::string& s, char sep = ':') {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) fail("config: trailing junk in number '" + s + "'", line);
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail("config: cannot parse number '" + s + "'", line);
  }
}

long to_long(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) fail("config: trailing junk in integer '" + s + "'", line);
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail("config: cannot parse integer '" + s + "'", line);
  }
}

bool to_bool(const std::string& s, int line) {
  const std::string v = lower(s);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail("config: cannot parse boolean '" + s + "'", line);
}

// Helper over one section: tracks which keys were consumed so that unknown
// keys are reported with their line.
class SectionReader {
 public:
  SectionReader(const RawConfig& cfg, const std::string& name) : name_(name) {
    auto it = cfg.find(name);
    if (it != cfg.end()) sec_ = &it->second;
  }

  bool present() const { return sec_ != nullptr; }

  std::optional<RawValue> get(const std::string& key) {
    if (!sec_) return std::nullopt;
    auto it = sec_->find(key);
    if (it == sec_->end()) return std::nullopt;
    used_.push_back(key);
    return it->second;
  }

  RawValue require(const std::string& key) {
    auto v = get(key);
    if (!v) throw ConfigError("config: [" + name_ + "] is missing key '" + key + "'");
    return *v;
  }

  double number(const std::string& key, double dflt) {
    auto v = get(key);
    return v ? to_double(v->text, v->line) : dflt;
  }

  long integer(const std::string& key, long dflt) {
    auto v = get(key);
    return v ? to_long(v->text, v->line) : dflt;
  }

  bool boolean(const std::string& key, bool dflt) {
    auto v = get(key);
    return v ? to_bool(v->text, v->line) : dflt;
  }

  std::string word(const std::string& key, const std::string& dflt) {
    auto v = get(key);
    return v ? lower(v->text) : dflt;
  }

  void check_unknown() const {
    if (!sec_) return;
    for (const auto& [key, val] : *sec_)
      if (std::find(used_.begin(), used_.end(), key) == used_.end())
        fail("config: unknown key '" + key + "' in [" + name_ + "]", val.line);
  }

 private:
  std::string name_;
  const Section* sec_ = nullptr;
  std::vector<std::string> used_;
};

ScalarLaw parse_scalar_law(const RawValue& rv, const std::string& what) {
  const auto toks = split_ws(rv.text);
  if (toks.empty()) fail("config: " + what + " law is empty", rv.line);
  const std::string kind = lower(toks[0]);
  ScalarLaw law;
  if (kind == "point") {
    if (toks.size() != 2) fail("config: " + what + " point law needs one value", rv.line);
    law.kind = ScalarLaw::Kind::Point;
    law.value = to_double(toks[1], rv.line);
  } else if (kind == "normal") {
    if (toks.size() != 3)
      fail("config: " + what + " normal law needs mean and sd", rv.line);
    law.kind = ScalarLaw::Kind::Normal;
    law.mean = to_double(toks[1], rv.line);
    law.sd = to_double(toks[2], rv.line);
  } else if (kind == "atoms") {
    if (toks.size() < 3 || (toks.size() - 1) % 2 != 0)
      fail("config: " + what + " atom law needs value/prob pairs", rv.line);
    law.kind = ScalarLaw::Kind::Atoms;
    for (std::size_t i = 1; i < toks.size(); i += 2)
      law.atoms.push_back(
          {to_double(toks[i], rv.line), to_double(toks[i + 1], rv.line)});
  } else {
    fail("config: unknown " + what + " law '" + kind + "'", rv.line);
  }
  try {
    law.validate(what);
  } catch (const ConfigError& e) {
    fail(e.what(), rv.line);
  }
  return law;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  const RawConfig raw = parse_raw(text);
  for (const auto& [name, _] : raw) {
    if (name != "rates" && name != "arrivals" && name != "initial" &&
        name != "experiment" && name != "diffusion" && name != "fairness")
      throw ConfigError("config: unknown section [" + name + "]");
  }

  ExperimentConfig cfg;

  {
    SectionReader r(raw, "rates");
    if (!r.present()) throw ConfigError("config: missing [rates] section");
    const std::string kind = r.word("kind", "iid");
    if (kind == "iid")
      cfg.rates.kind = RateLawKind::Iid;
    else if (kind == "table")
      cfg.rates.kind = RateLawKind::Table;
    else
      throw ConfigError("config: [rates] kind must be iid or table");

    const std::string lawname = r.word("law", "atoms");
    if (lawname == "atoms") {
      const RawValue rv = r.require("atoms");
      const auto groups = split_groups(rv.text);
      for (const auto& g : groups) {
        const auto toks = split_ws(g);
        if (toks.size() != 3)
          fail("config: rate atoms are 'tilde hat prob' triples", rv.line);
        cfg.rates.atoms.push_back({to_double(toks[0], rv.line),
                                   to_double(toks[1], rv.line),
                                   to_double(toks[2], rv.line)});
      }
    } else {
      auto parse_component = [](const std::vector<std::string>& toks, int line,
                                double weight) {
        TildeComponent c;
        c.weight = weight;
        if (toks.empty()) fail("config: empty rate component", line);
        const std::string k = lower(toks[0]);
        if (k == "uniform") {
          if (toks.size() != 3) fail("config: uniform component needs lo hi", line);
          c.kind = TildeComponent::Kind::Uniform;
          c.a = to_double(toks[1], line);
          c.b = to_double(toks[2], line);
        } else if (k == "trunc_normal") {
          if (toks.size() != 5)
            fail("config: trunc_normal component needs mean sd lo hi", line);
          c.kind = TildeComponent::Kind::TruncNormal;
          c.mean = to_double(toks[1], line);
          c.sd = to_double(toks[2], line);
          c.lo = to_double(toks[3], line);
          c.hi = to_double(toks[4], line);
        } else {
          fail("config: unknown rate component '" + k + "'", line);
        }
        return c;
      };
      if (lawname == "uniform") {
        const RawValue lo = r.require("tilde_lo");
        const RawValue hi = r.require("tilde_hi");
        TildeComponent c;
        c.kind = TildeComponent::Kind::Uniform;
        c.a = to_double(lo.text, lo.line);
        c.b = to_double(hi.text, hi.line);
        cfg.rates.components.push_back(c);
      } else if (lawname == "trunc_normal") {
        const RawValue m = r.require("tilde_mean");
        const RawValue sd = r.require("tilde_sd");
        const RawValue lo = r.require("tilde_lo");
        const RawValue hi = r.require("tilde_hi");
        TildeComponent c;
        c.kind = TildeComponent::Kind::TruncNormal;
        c.mean = to_double(m.text, m.line);
        c.sd = to_double(sd.text, sd.line);
        c.lo = to_double(lo.text, lo.line);
        c.hi = to_double(hi.text, hi.line);
        cfg.rates.components.push_back(c);
      } else if (lawname == "mixture") {
        const RawValue rv = r.require("components");
        for (const auto& g : split_groups(rv.text)) {
          auto toks = split_ws(g);
          if (toks.size() < 2) fail("config: mixture component needs weight", rv.line);
          const double w = to_double(toks[0], rv.line);
          toks.erase(toks.begin());
          cfg.rates.components.push_back(parse_component(toks, rv.line, w));
        }
      } else {
        throw ConfigError("config: [rates] law must be atoms, uniform, trunc_normal, or mixture");
      }
      const auto hat = r.get("hat_atoms");
      if (hat) {
        const auto toks = split_ws(hat->text);
        if (toks.empty() || toks.size() % 2 != 0)
          fail("config: hat_atoms are value/prob pairs", hat->line);
        for (std::size_t i = 0; i < toks.size(); i += 2)
          cfg.rates.hat_atoms.push_back(
              {to_double(toks[i], hat->line), to_double(toks[i + 1], hat->line)});
      } else {
        cfg.rates.hat_atoms.push_back({0.0, 1.0});
      }
    }
    r.check_unknown();
  }

  {
    SectionReader r(raw, "arrivals");
    const std::string fam = r.word("family", "exponential");
    if (fam == "deterministic")
      cfg.arrival_family = ArrivalFamily::Deterministic;
    else if (fam == "exponential")
      cfg.arrival_family = ArrivalFamily::Exponential;
    else if (fam == "erlang")
      cfg.arrival_family = ArrivalFamily::Erlang;
    else if (fam == "hyperexp2")
      cfg.arrival_family = ArrivalFamily::HyperExp2;
    else if (fam == "uniform")
      cfg.arrival_family = ArrivalFamily::Uniform;
    else if (fam == "lognormal")
      cfg.arrival_family = ArrivalFamily::Lognormal;
    else
      throw ConfigError("config: unknown arrival family '" + fam + "'");
    cfg.c_u_sq = r.number("scv", fam == "deterministic" ? 0.0 : 1.0);
    cfg.erlang_shape = static_cast<int>(r.integer("erlang_shape", 0));
    cfg.lambda_hat = r.number("lambda_hat", 0.0);
    r.check_unknown();
  }

  {
    SectionReader r(raw, "initial");
    if (auto v = r.get("xi0")) cfg.initial.xi0_law = parse_scalar_law(*v, "xi0");
    if (auto v = r.get("nu")) cfg.initial.nu_law = parse_scalar_law(*v, "nu");
    cfg.initial.independent = r.boolean("independent", true);
    const std::string pl = r.word("placement", "");
    if (pl == "random_uniform")
      cfg.initial.placement = IdlePlacement::RandomUniform;
    else if (pl == "fastest_busy")
      cfg.initial.placement = IdlePlacement::FastestBusy;
    else if (!pl.empty())
      throw ConfigError("config: placement must be random_uniform or fastest_busy");
    r.check_unknown();
  }

  bool placement_given = raw.count("initial") && raw.at("initial").count("placement");

  {
    SectionReader r(raw, "experiment");
    const std::string pol = r.word("policy", "p1");
    if (pol == "p1")
      cfg.policy = PolicyKind::P1;
    else if (pol == "p2")
      cfg.policy = PolicyKind::P2;
    else if (pol == "random")
      cfg.policy = PolicyKind::Random;
    else
      throw ConfigError("config: policy must be p1, p2, or random");
    const std::string mech = r.word("mechanism", "per_server");
    if (mech == "per_server")
      cfg.mechanism = ServiceMode::PerServer;
    else if (mech == "pooled")
      cfg.mechanism = ServiceMode::Pooled;
    else
      throw ConfigError("config: mechanism must be per_server or pooled");
    if (auto v = r.get("ladder")) {
      cfg.ladder.clear();
      for (const auto& tok : split_ws(v->text)) cfg.ladder.push_back(to_long(tok, v->line));
      if (cfg.ladder.empty()) fail("config: empty ladder", v->line);
    }
    cfg.replications = r.integer("replications", cfg.replications);
    cfg.horizon = r.number("horizon", cfg.horizon);
    cfg.sample_dt = r.number("sample_dt", cfg.sample_dt);
    if (auto v = r.get("report_times")) {
      cfg.report_times.clear();
      for (const auto& tok : split_ws(v->text))
        cfg.report_times.push_back(to_double(tok, v->line));
    }
    cfg.seed = static_cast<std::uint64_t>(r.integer("seed", 1));
    if (auto v = r.get("out_dir")) cfg.out_dir = v->text;
    r.check_unknown();
  }

  {
    SectionReader r(raw, "diffusion");
    cfg.diffusion.step = r.number("step", cfg.diffusion.step);
    cfg.diffusion.horizon = r.number("horizon", cfg.horizon);
    cfg.diffusion.paths = r.integer("paths", cfg.diffusion.paths);
    const std::string drift = r.word("drift", "");
    if (drift == "gamma") {
      cfg.diffusion.drift = DriftCoeff::Gamma;
      cfg.diffusion.drift_set = true;
    } else if (drift == "mu_min") {
      cfg.diffusion.drift = DriftCoeff::MuMin;
      cfg.diffusion.drift_set = true;
    } else if (!drift.empty()) {
      throw ConfigError("config: drift must be gamma or mu_min");
    }
    r.check_unknown();
  }

  {
    SectionReader r(raw, "fairness");
    cfg.fairness.s = r.number("s", cfg.fairness.s);
    cfg.fairness.c = r.number("c", cfg.fairness.c);
    r.check_unknown();
  }

  if (!placement_given)
    cfg.initial.placement = cfg.policy == PolicyKind::P2 ? IdlePlacement::FastestBusy
                                                         : IdlePlacement::RandomUniform;

  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() {
  rates.validate();
  limits = derive_limit_params(rates, lambda_hat, c_u_sq);
  law = make_interarrival_law(arrival_family, c_u_sq, erlang_shape);
  initial.xi0_law.validate("xi0");
  initial.nu_law.validate("nu");
  if (rates.kind == RateLawKind::Table) {
    if (initial.nu_law.kind != ScalarLaw::Kind::Point || initial.nu_law.value != 0.0)
      throw ConfigError("config: table rate layouts require nu = point 0");
  }
  if (ladder.empty()) throw ConfigError("config: empty ladder");
  for (long n : ladder) {
    if (n < 1) throw ConfigError("config: ladder entries must be positive");
    if (arrival_rate(n, limits.mu, lambda_hat) <= 0.0)
      throw ConfigError("config: arrival rate nonpositive at n=" + std::to_string(n));
  }
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (ladder[i] <= ladder[i - 1])
      throw ConfigError("config: ladder must be strictly increasing");
  if (replications < 1) throw ConfigError("config: replications must be positive");
  if (!(horizon > 0.0)) throw ConfigError("config: horizon must be positive");
  if (!(sample_dt > 0.0)) throw ConfigError("config: sample_dt must be positive");
  if (report_times.empty()) throw ConfigError("config: report_times is empty");
  for (double t : report_times) {
    if (t < 0.0 || t > horizon + 1e-9)
      throw ConfigError("config: report time outside [0, horizon]");
    const double k = t / sample_dt;
    if (std::abs(k - std::round(k)) > 1e-6)
      throw ConfigError("config: report times must lie on the sample grid");
  }
  if (!(diffusion.step > 0.0)) throw ConfigError("config: diffusion step must be positive");
  if (!(diffusion.horizon > 0.0))
    throw ConfigError("config: diffusion horizon must be positive");
  if (diffusion.paths < 1) throw ConfigError("config: diffusion paths must be positive");
  if (!(fairness.s >= 0.0)) throw ConfigError("config: fairness s must be nonnegative");
  if (!(fairness.c > 0.0)) throw ConfigError("config: fairness c must be positive");
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace hwsim
