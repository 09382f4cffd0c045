#include "hwsim/commands.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>

#include "hwsim/csv_io.hpp"
#include "hwsim/experiment.hpp"
#include "hwsim/stats.hpp"
#include "hwsim/svg.hpp"

namespace hwsim {

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::vector<double> sde_times(const ExperimentConfig& cfg) {
  std::vector<double> ts;
  for (double t : cfg.report_times)
    if (t <= cfg.diffusion.horizon + 1e-9) ts.push_back(t);
  return ts;
}

}  // namespace

std::string marginal_file(const ExperimentConfig& cfg, long n, double t) {
  return join(cfg.out_dir,
              "marginal_n" + std::to_string(n) + "_t" + format_number(t) + ".csv");
}

std::string sde_marginal_file(const ExperimentConfig& cfg, double t) {
  return join(cfg.out_dir, "sde_marginal_t" + format_number(t) + ".csv");
}

std::string paths_file(const ExperimentConfig& cfg, long n) {
  return join(cfg.out_dir, "paths_n" + std::to_string(n) + ".csv");
}

int cmd_simulate(const ExperimentConfig& cfg, int workers, std::ostream& log) {
  ensure_directory(cfg.out_dir);
  CollectOptions what;
  what.keep_path = true;
  what.marginal_times = cfg.report_times;

  for (long n : cfg.ladder) {
    const auto outs = simulate_many(cfg, n, 0, cfg.replications, what, workers);

    CsvWriter pw(paths_file(cfg, n));
    pw.header({"rep", "t", "X", "Q", "I", "xhat"});
    for (long rep = 0; rep < cfg.replications; ++rep) {
      const PathRecord& rec = *outs[rep].path;
      const double root = std::sqrt(static_cast<double>(rec.n));
      for (const auto& s : rec.samples) {
        const double xhat = static_cast<double>(s.x - rec.num_servers) / root;
        pw.row({CsvWriter::cell(rep), CsvWriter::cell(s.t), CsvWriter::cell(s.x),
                CsvWriter::cell(s.q), CsvWriter::cell(s.idle), CsvWriter::cell(xhat)});
      }
    }
    pw.close();
    log << "wrote " << paths_file(cfg, n) << "\n";

    for (std::size_t j = 0; j < cfg.report_times.size(); ++j) {
      const double t = cfg.report_times[j];
      CsvWriter mw(marginal_file(cfg, n, t));
      mw.header({"rep", "xhat"});
      for (long rep = 0; rep < cfg.replications; ++rep)
        mw.row({CsvWriter::cell(rep), CsvWriter::cell(outs[rep].marginals[j])});
      mw.close();
      log << "wrote " << marginal_file(cfg, n, t) << "\n";
    }
  }
  return kExitOk;
}

int cmd_diffusion(const ExperimentConfig& cfg, int workers, std::ostream& log) {
  ensure_directory(cfg.out_dir);
  const auto paths = diffusion_paths(cfg, cfg.diffusion.paths, workers);

  const std::string pfile = join(cfg.out_dir, "sde_paths.csv");
  CsvWriter pw(pfile);
  pw.header({"path", "t", "xi"});
  for (std::size_t p = 0; p < paths.size(); ++p)
    for (std::size_t i = 0; i < paths[p].t.size(); ++i)
      pw.row({CsvWriter::cell(static_cast<long>(p)), CsvWriter::cell(paths[p].t[i]),
              CsvWriter::cell(paths[p].xi[i])});
  pw.close();
  log << "wrote " << pfile << "\n";

  for (double t : sde_times(cfg)) {
    const auto values = marginal_at(paths, t);
    CsvWriter mw(sde_marginal_file(cfg, t));
    mw.header({"path", "xi"});
    for (std::size_t p = 0; p < values.size(); ++p)
      mw.row({CsvWriter::cell(static_cast<long>(p)), CsvWriter::cell(values[p])});
    mw.close();
    log << "wrote " << sde_marginal_file(cfg, t) << "\n";
  }
  return kExitOk;
}

int cmd_compare(const ExperimentConfig& cfg, int, std::ostream& log) {
  ensure_directory(cfg.out_dir);
  SvgChart chart;
  chart.title = "Scaled head count vs limit law";
  chart.x_label = "n";
  chart.y_label = "KS distance";
  chart.log_x = true;

  for (double t : sde_times(cfg)) {
    const std::string sfile = sde_marginal_file(cfg, t);
    if (!std::filesystem::exists(sfile)) {
      log << "missing " << sfile << " (run the diffusion command first)\n";
      return kExitMissing;
    }
    const CsvTable sde = read_csv(sfile);
    const int xi_col = sde.column("xi");
    if (xi_col < 0 || sde.rows.empty()) {
      log << "no usable reference sample in " << sfile << "\n";
      return kExitMissing;
    }
    std::vector<double> ref;
    ref.reserve(sde.rows.size());
    for (const auto& r : sde.rows) ref.push_back(r[xi_col]);

    std::vector<std::pair<long, std::vector<double>>> ladder;
    for (long n : cfg.ladder) {
      const std::string mfile = marginal_file(cfg, n, t);
      if (!std::filesystem::exists(mfile)) {
        log << "missing " << mfile << " (run the simulate command first)\n";
        return kExitMissing;
      }
      const CsvTable tab = read_csv(mfile);
      const int col = tab.column("xhat");
      if (col < 0 || tab.rows.empty()) {
        log << "no usable sample in " << mfile << "\n";
        return kExitMissing;
      }
      std::vector<double> xs;
      xs.reserve(tab.rows.size());
      for (const auto& r : tab.rows) xs.push_back(r[col]);
      ladder.emplace_back(n, std::move(xs));
    }

    const auto rows = convergence_table(ladder, ref);
    const std::string cfile = join(cfg.out_dir, "compare_t" + format_number(t) + ".csv");
    CsvWriter cw(cfile);
    cw.header({"n", "reps", "ks_d", "ks_p", "w1", "mean", "variance", "mean_ci_half"});
    SvgSeries series;
    series.name = "t=" + format_number(t);
    for (const auto& r : rows) {
      cw.row({CsvWriter::cell(r.n), CsvWriter::cell(static_cast<long long>(r.reps)),
              CsvWriter::cell(r.ks_d), CsvWriter::cell(r.ks_p), CsvWriter::cell(r.w1),
              CsvWriter::cell(r.mean), CsvWriter::cell(r.variance),
              CsvWriter::cell(r.mean_ci_half)});
      series.x.push_back(static_cast<double>(r.n));
      series.y.push_back(r.ks_d);
    }
    cw.close();
    log << "wrote " << cfile << "\n";
    chart.series.push_back(std::move(series));
  }

  const std::string chart_file = join(cfg.out_dir, "compare_ks.svg");
  write_svg_chart(chart_file, chart);
  log << "wrote " << chart_file << "\n";
  return kExitOk;
}

int cmd_fairness(const ExperimentConfig& cfg, int workers, std::ostream& log) {
  if (cfg.policy != PolicyKind::P1)
    throw ConfigError(
        "fairness: the idle-period study measures the longest-idle routing rule; "
        "set policy = p1");
  ensure_directory(cfg.out_dir);
  CollectOptions what;
  what.fairness = true;
  what.fairness_s = cfg.fairness.s;
  what.fairness_c = cfg.fairness.c;

  // reference: E[xi(s)^- / mu] under the limit process
  double ref_mean = 0.0;
  {
    ExperimentConfig sde_cfg = cfg;
    sde_cfg.diffusion.horizon = std::max(cfg.fairness.s, cfg.diffusion.step);
    const auto paths = diffusion_paths(sde_cfg, cfg.diffusion.paths, workers);
    const auto xs = marginal_at(paths, sde_cfg.diffusion.horizon);
    double acc = 0.0;
    for (double x : xs) acc += std::max(-x, 0.0) / cfg.limits.mu;
    ref_mean = acc / static_cast<double>(xs.size());
  }

  SvgSeries sup_series{"mean scaled longest", {}, {}};
  SvgSeries inf_series{"mean scaled shortest", {}, {}};
  SvgSeries ref_series{"limit mean", {}, {}};

  const std::string sumfile = join(cfg.out_dir, "fairness_summary.csv");
  CsvWriter sw(sumfile);
  sw.header({"n", "reps_with_data", "mean_sup", "mean_inf", "mean_gap", "limit_mean"});

  for (long n : cfg.ladder) {
    const auto outs = simulate_many(cfg, n, 0, cfg.replications, what, workers);
    const std::string ffile =
        join(cfg.out_dir, "fairness_n" + std::to_string(n) + ".csv");
    CsvWriter fw(ffile);
    fw.header({"rep", "n", "s", "t_n", "sup_scaled", "inf_scaled", "count"});
    std::vector<double> sups, infs;
    const double t_n = cfg.fairness.s + cfg.fairness.c * std::pow(n, -0.25);
    for (long rep = 0; rep < cfg.replications; ++rep) {
      const auto& f = outs[rep].fairness;
      if (f) {
        fw.row({CsvWriter::cell(rep), CsvWriter::cell(n), CsvWriter::cell(cfg.fairness.s),
                CsvWriter::cell(f->t_n), CsvWriter::cell(f->sup_scaled),
                CsvWriter::cell(f->inf_scaled), CsvWriter::cell(f->count)});
        sups.push_back(f->sup_scaled);
        infs.push_back(f->inf_scaled);
      } else {
        fw.row({CsvWriter::cell(rep), CsvWriter::cell(n), CsvWriter::cell(cfg.fairness.s),
                CsvWriter::cell(t_n), "nan", "nan", "0"});
      }
    }
    fw.close();
    log << "wrote " << ffile << "\n";

    const auto ssup = summarize(sups);
    const auto sinf = summarize(infs);
    sw.row({CsvWriter::cell(n), CsvWriter::cell(static_cast<long long>(sups.size())),
            CsvWriter::cell(ssup.mean), CsvWriter::cell(sinf.mean),
            CsvWriter::cell(ssup.mean - sinf.mean), CsvWriter::cell(ref_mean)});
    if (!sups.empty()) {
      sup_series.x.push_back(static_cast<double>(n));
      sup_series.y.push_back(ssup.mean);
      inf_series.x.push_back(static_cast<double>(n));
      inf_series.y.push_back(sinf.mean);
      ref_series.x.push_back(static_cast<double>(n));
      ref_series.y.push_back(ref_mean);
    }
  }
  sw.close();
  log << "wrote " << sumfile << "\n";

  SvgChart chart;
  chart.title = "Idle-period extremes near one time point";
  chart.x_label = "n";
  chart.y_label = "sqrt(n) x idle period length";
  chart.log_x = true;
  chart.series = {sup_series, inf_series, ref_series};
  const std::string chart_file = join(cfg.out_dir, "fairness_gap.svg");
  write_svg_chart(chart_file, chart);
  log << "wrote " << chart_file << "\n";
  return kExitOk;
}

int cmd_validate(const ExperimentConfig& cfg, int workers, std::ostream& log) {
  bool ok = true;

  // 1. strict invariant battery on the largest system
  const long n = cfg.ladder.back();
  const long reps = std::min<long>(cfg.replications, 200);
  CollectOptions strict;
  strict.strict_invariants = true;
  strict.marginal_times = {cfg.report_times.front()};
  long long violations = 0;
  long long events = 0;
  std::vector<double> xhat;
  xhat.reserve(reps);
  const auto outs = simulate_many(cfg, n, 0, reps, strict, workers);
  for (const auto& o : outs) {
    violations += o.violations;
    events += o.events;
    xhat.push_back(o.marginals.front());
  }
  log << "invariants: " << violations << " violations over " << events << " events ("
      << reps << " replications at n=" << n << ")\n";
  if (violations > 0) ok = false;

  // 2. both service mechanisms should produce the same law
  {
    ExperimentConfig alt = cfg;
    alt.mechanism = cfg.mechanism == ServiceMode::Pooled ? ServiceMode::PerServer
                                                         : ServiceMode::Pooled;
    CollectOptions m;
    m.marginal_times = {cfg.report_times.front()};
    const auto other = simulate_many(alt, n, reps, reps, m, workers);
    std::vector<double> xhat2;
    xhat2.reserve(reps);
    for (const auto& o : other) xhat2.push_back(o.marginals.front());
    const auto ks = ks_two_sample(xhat, xhat2);
    log << "mechanism equivalence: ks_d=" << format_number(ks.d)
        << " p=" << format_number(ks.p_value) << "\n";
    if (ks.p_value < 1e-3) ok = false;
  }

  // 3. reduced diffusion comparison at the first report time
  {
    const double t = cfg.report_times.front();
    if (t > 0.0 && t <= cfg.diffusion.horizon + 1e-9) {
      ExperimentConfig sde_cfg = cfg;
      const long paths = std::min<long>(cfg.diffusion.paths, 1000);
      const auto dpaths = diffusion_paths(sde_cfg, paths, workers);
      const auto ref = marginal_at(dpaths, t);
      const auto ks = ks_two_sample(xhat, ref);
      log << "limit comparison at t=" << format_number(t)
          << ": ks_d=" << format_number(ks.d) << " p=" << format_number(ks.p_value)
          << "\n";
      if (ks.d > 0.2) ok = false;
    }
  }

  log << (ok ? "validate: ok" : "validate: FAILED") << "\n";
  return ok ? kExitOk : kExitInvariant;
}

}  // namespace hwsim
