#include "hwsim/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hwsim {

PathRecorder::PathRecorder(const EnvironmentRealization& env,
                           const RecorderOptions& opt, double horizon)
    : env_(env), opt_(opt) {
  if (!(opt.sample_dt > 0.0)) throw EngineError("recorder: sample_dt must be positive");
  rec_.n = env.n;
  rec_.num_servers = env.num_servers;
  rec_.horizon = horizon;
  rec_.sample_dt = opt.sample_dt;
  grid_count_ = static_cast<long>(std::floor(horizon / opt.sample_dt + 1e-9)) + 1;
}

void PathRecorder::begin(const SystemState& st) {
  rec_.samples.reserve(grid_count_);
  if (opt_.record_intervals) rec_.idle_intervals.assign(st.num_servers, {});
  if (opt_.fast_tilde_min) {
    fast_idle_ = 0;
    for (long k = 0; k < st.num_servers; ++k)
      if (!st.servers[k].busy && env_.tilde_rates[k] >= *opt_.fast_tilde_min)
        ++fast_idle_;
  }
}

void PathRecorder::emit(double t, const SystemState& st) {
  rec_.samples.push_back({t, st.x(), st.queue_len, st.idle_count()});
  if (opt_.fast_tilde_min) {
    const double scaled =
        static_cast<double>(fast_idle_) / std::sqrt(static_cast<double>(rec_.n));
    rec_.fast_idle_sup = std::max(rec_.fast_idle_sup, scaled);
  }
}

void PathRecorder::before_event(double t, const SystemState& st) {
  while (next_ < grid_count_ && grid_t(next_) < t) {
    emit(grid_t(next_), st);
    ++next_;
  }
}

void PathRecorder::after_event(const EventInfo& info, const SystemState&) {
  if (info.routed >= 0 && opt_.record_intervals)
    rec_.idle_intervals[info.routed].push_back({info.routed_idle_since, info.t});
  if (opt_.fast_tilde_min) {
    const double thr = *opt_.fast_tilde_min;
    // a departure with nothing queued opens an idle interval
    if (info.departed >= 0 && info.routed != info.departed &&
        env_.tilde_rates[info.departed] >= thr)
      ++fast_idle_;
    // routing to a different server than the one departing closes one
    if (info.routed >= 0 && info.routed != info.departed &&
        env_.tilde_rates[info.routed] >= thr)
      --fast_idle_;
  }
  if (opt_.record_events) rec_.events.push_back(info);
}

void PathRecorder::finish(const SystemState& st, double) {
  while (next_ < grid_count_) {
    emit(grid_t(next_), st);
    ++next_;
  }
  rec_.open_idle_since.assign(st.num_servers, std::nullopt);
  for (long k = 0; k < st.num_servers; ++k)
    if (!st.servers[k].busy) rec_.open_idle_since[k] = st.servers[k].idle_since;
  rec_.arrivals = st.arrivals_seen;
  rec_.completions = st.total_completions;
  rec_.routings = st.total_routings;
}

void InvariantRecorder::fail(const InvariantReport& rep) {
  if (violations_ == 0) first_ = rep;
  ++violations_;
  if (throw_) throw EngineError(rep.tag + ": " + rep.detail);
}

void InvariantRecorder::check_full(const SystemState& st) {
  const InvariantReport rep = verify_event_invariants(st);
  if (!rep.ok) fail(rep);
  since_ = 0;
}

void InvariantRecorder::after_event(const EventInfo& info, const SystemState& st) {
  // O(1) aggregate identities on every event
  const long long x = st.x();
  InvariantReport rep;
  rep.t = st.clock;
  if (x != st.queue_len + st.busy_count) {
    rep.ok = false;
    rep.tag = "head count";
    rep.detail = "x != queue + busy after event";
  } else if (st.queue_len != std::max<long long>(x - st.num_servers, 0)) {
    rep.ok = false;
    rep.tag = "work conservation";
    rep.detail = "queue != (x - N)+ after event";
  } else if (info.routed >= 0 && !st.servers[info.routed].busy) {
    rep.ok = false;
    rep.tag = "routing";
    rep.detail = "routed server not busy after event";
  } else if (info.departed >= 0 && info.routed != info.departed &&
             st.servers[info.departed].busy) {
    rep.ok = false;
    rep.tag = "departure";
    rep.detail = "departing server still busy with empty queue";
  }
  if (!rep.ok) {
    fail(rep);
    return;
  }
  if (++since_ >= stride_) check_full(st);
}

std::vector<ScaledPoint> scale_path(const PathRecord& rec) {
  std::vector<ScaledPoint> out;
  out.reserve(rec.samples.size());
  const double root = std::sqrt(static_cast<double>(rec.n));
  for (const auto& s : rec.samples) {
    ScaledPoint p;
    p.t = s.t;
    p.xhat = static_cast<double>(s.x - rec.num_servers) / root;
    p.qhat = static_cast<double>(s.q) / root;
    p.ihat = static_cast<double>(s.idle) / root;
    out.push_back(p);
  }
  return out;
}

double xhat_at(const PathRecord& rec, double t) {
  const long i = static_cast<long>(std::llround(t / rec.sample_dt));
  if (i < 0 || i >= static_cast<long>(rec.samples.size()) ||
      std::abs(rec.samples[i].t - t) > 1e-9)
    throw std::out_of_range("xhat_at: t is not a recorded grid point");
  const double root = std::sqrt(static_cast<double>(rec.n));
  return static_cast<double>(rec.samples[i].x - rec.num_servers) / root;
}

std::optional<IdleWindowStats> idle_window_stats(const PathRecord& rec, double s,
                                                 double t) {
  if (rec.idle_intervals.empty() && rec.num_servers > 0)
    throw std::logic_error("idle_window_stats: intervals were not recorded");
  if (!(s <= t)) throw std::invalid_argument("idle_window_stats: need s <= t");
  IdleWindowStats st;
  bool any = false;
  for (const auto& iv : rec.idle_intervals) {
    // intervals are stored in completion order, so ends are nondecreasing
    auto it = std::upper_bound(iv.begin(), iv.end(), t,
                               [](double v, const IdleInterval& a) { return v < a.end; });
    if (it == iv.begin()) continue;
    const auto& last = *std::prev(it);
    if (last.end < s) continue;
    const double len = last.end - last.start;
    if (!any) {
      st.sup_len = st.inf_len = len;
      any = true;
    } else {
      st.sup_len = std::max(st.sup_len, len);
      st.inf_len = std::min(st.inf_len, len);
    }
    ++st.count;
  }
  if (!any) return std::nullopt;
  return st;
}

std::optional<FairnessSample> fairness_from_path(const PathRecord& rec, double s,
                                                 double c) {
  const double root = std::sqrt(static_cast<double>(rec.n));
  const double t_n = s + c * std::pow(static_cast<double>(rec.n), -0.25);
  const auto stats = idle_window_stats(rec, s, t_n);
  if (!stats) return std::nullopt;
  FairnessSample f;
  f.t_n = t_n;
  f.sup_scaled = root * stats->sup_len;
  f.inf_scaled = root * stats->inf_len;
  f.count = stats->count;
  return f;
}

}  // namespace hwsim
