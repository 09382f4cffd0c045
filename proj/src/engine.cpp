#include "hwsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace hwsim {

namespace {

std::string fail_detail(const char* what, double t, long long lhs, long long rhs) {
  std::ostringstream os;
  os << what << ": " << lhs << " vs " << rhs << " at t=" << t;
  return os.str();
}

}  // namespace

InvariantReport verify_event_invariants(const SystemState& st) {
  InvariantReport rep;
  rep.t = st.clock;

  long long busy = 0, comp = 0, rout = 0;
  for (long k = 0; k < st.num_servers; ++k) {
    const auto& s = st.servers[k];
    comp += s.completions;
    rout += s.routings;
    busy += s.busy;
    const long long flag =
        static_cast<long long>(s.busy0) + s.routings - s.completions;
    if (flag != s.busy || (flag != 0 && flag != 1)) {
      rep.ok = false;
      rep.tag = "server balance";
      rep.detail = fail_detail("busy flag vs start+routings-completions",
                               st.clock, s.busy, flag) +
                   " (server " + std::to_string(k) + ")";
      return rep;
    }
  }
  if (busy != st.busy_count || comp != st.total_completions ||
      rout != st.total_routings) {
    rep.ok = false;
    rep.tag = "aggregate counters";
    rep.detail = fail_detail("recomputed busy/completions/routings", st.clock,
                             busy, st.busy_count);
    return rep;
  }
  const long long x = st.x();
  if (x != st.queue_len + busy) {
    rep.ok = false;
    rep.tag = "head count";
    rep.detail = fail_detail("x vs queue+busy", st.clock, x, st.queue_len + busy);
    return rep;
  }
  const long long want_q = std::max<long long>(x - st.num_servers, 0);
  const long long want_idle = std::max<long long>(st.num_servers - x, 0);
  if (st.queue_len != want_q || st.idle_count() != want_idle) {
    rep.ok = false;
    rep.tag = "work conservation";
    rep.detail = fail_detail("queue vs (x-N)+", st.clock, st.queue_len, want_q);
    return rep;
  }
  return rep;
}

ServiceMechanism ServiceMechanism::pooled(const EnvironmentRealization& env) {
  ServiceMechanism m;
  m.mode = ServiceMode::Pooled;
  std::map<double, std::vector<int>> by_rate;
  for (long k = 0; k < env.num_servers; ++k)
    by_rate[env.rates[k]].push_back(static_cast<int>(k));
  m.classes.reserve(by_rate.size());
  for (auto& [rate, members] : by_rate) m.classes.push_back({std::move(members)});
  return m;
}

Engine::Engine(const EnvironmentRealization& env, const InitialState& init,
               RoutingPolicy& policy, ArrivalSource& arrivals,
               const ServiceMechanism& mech, double horizon,
               std::vector<Recorder*> recorders, RngStream service_rng)
    : env_(env),
      policy_(policy),
      arrivals_(arrivals),
      mech_(mech),
      horizon_(horizon),
      recorders_(std::move(recorders)),
      service_rng_(service_rng) {
  const long N = env.num_servers;
  if (static_cast<long>(init.busy0.size()) != N)
    throw EngineError("engine: initial busy vector size mismatch");
  if (horizon < 0.0) throw EngineError("engine: negative horizon");
  if (policy_.wants_rate_sorted()) {
    for (long k = 1; k < N; ++k)
      if (env.rates[k] < env.rates[k - 1])
        throw EngineError("engine: policy requires servers sorted by rate");
  }

  state_.n = env.n;
  state_.num_servers = N;
  state_.x0 = init.x0;
  state_.queue_len = init.q0;
  state_.servers.assign(N, ServerState{});
  for (long k = 0; k < N; ++k) {
    state_.servers[k].busy = init.busy0[k];
    state_.servers[k].busy0 = init.busy0[k];
    state_.busy_count += init.busy0[k];
  }

  if (mech_.mode == ServiceMode::Pooled) {
    const int C = static_cast<int>(mech_.classes.size());
    class_of_.assign(N, -1);
    slot_in_class_.assign(N, -1);
    class_busy_.assign(C, {});
    class_rate_.assign(C, 0.0);
    class_epoch_.assign(C, 0);
    for (int c = 0; c < C; ++c)
      for (int k : mech_.classes[c].members) {
        if (k < 0 || k >= N || class_of_[k] != -1)
          throw EngineError("engine: invalid pooled class layout");
        class_of_[k] = c;
      }
    for (long k = 0; k < N; ++k)
      if (class_of_[k] == -1)
        throw EngineError("engine: pooled classes must cover every server");
  }
}

void Engine::push_next_arrival() {
  const double t = arrivals_.next();
  if (std::isfinite(t)) heap_.push({t, 1, 0, 0});
}

void Engine::start_service(int server, double t) {
  if (mech_.mode == ServiceMode::PerServer) {
    const double rate = env_.rates[server];
    if (rate > 0.0)
      heap_.push({t + service_rng_.exponential(rate), 0, server, 0});
    // zero-rate servers hold their job forever
    return;
  }
  const int c = class_of_[server];
  slot_in_class_[server] = static_cast<int>(class_busy_[c].size());
  class_busy_[c].push_back(server);
  class_rate_[c] += env_.rates[server];
  reschedule_class(c, t);
}

void Engine::reschedule_class(int cls, double t) {
  ++class_epoch_[cls];
  if (class_rate_[cls] > 0.0 && !class_busy_[cls].empty())
    heap_.push({t + service_rng_.exponential(class_rate_[cls]), 0, cls,
                class_epoch_[cls]});
}

void Engine::apply_arrival(double t, EventInfo& info) {
  info.kind = EventInfo::Kind::Arrival;
  info.t = t;
  ++state_.arrivals_seen;
  if (policy_.empty()) {
    ++state_.queue_len;
    info.queued = true;
  } else {
    const int k = policy_.pop(t);
    if (k < 0 || k >= state_.num_servers || state_.servers[k].busy)
      throw EngineError("engine: policy returned an unavailable server (" +
                        std::to_string(k) + ") at t=" + std::to_string(t));
    info.routed = k;
    info.routed_idle_since = state_.servers[k].idle_since;
    state_.servers[k].busy = 1;
    ++state_.busy_count;
    ++state_.servers[k].routings;
    ++state_.total_routings;
    start_service(k, t);
  }
  push_next_arrival();
}

void Engine::apply_departure(int server, double t, EventInfo& info) {
  info.kind = EventInfo::Kind::Departure;
  info.t = t;
  info.departed = server;
  auto& s = state_.servers[server];
  ++s.completions;
  ++state_.total_completions;
  if (state_.queue_len > 0) {
    // head-of-line job takes the server immediately; the idle period has
    // length zero and is recorded as such
    --state_.queue_len;
    ++s.routings;
    ++state_.total_routings;
    info.routed = server;
    info.routed_idle_since = t;
    if (mech_.mode == ServiceMode::PerServer) {
      start_service(server, t);
    }
    // pooled: the busy set is unchanged; the class clock restarts below
  } else {
    s.busy = 0;
    s.idle_since = t;
    --state_.busy_count;
    if (mech_.mode == ServiceMode::Pooled) {
      const int c = class_of_[server];
      const int slot = slot_in_class_[server];
      auto& members = class_busy_[c];
      members[slot] = members.back();
      slot_in_class_[members[slot]] = slot;
      members.pop_back();
      slot_in_class_[server] = -1;
      class_rate_[c] -= env_.rates[server];
      if (members.empty()) class_rate_[c] = 0.0;  // kill fp residue
    }
    policy_.on_idle(server, t);
  }
  if (mech_.mode == ServiceMode::Pooled) reschedule_class(class_of_[server], t);
}

void Engine::run() {
  for (auto* r : recorders_) r->begin(state_);

  if (mech_.mode == ServiceMode::PerServer) {
    for (long k = 0; k < state_.num_servers; ++k)
      if (state_.servers[k].busy) start_service(static_cast<int>(k), 0.0);
  } else {
    // seed the class busy sets from the initial flags, then arm each clock
    for (long k = 0; k < state_.num_servers; ++k) {
      if (!state_.servers[k].busy) continue;
      const int c = class_of_[k];
      slot_in_class_[k] = static_cast<int>(class_busy_[c].size());
      class_busy_[c].push_back(static_cast<int>(k));
      class_rate_[c] += env_.rates[k];
    }
    for (std::size_t c = 0; c < class_busy_.size(); ++c)
      reschedule_class(static_cast<int>(c), 0.0);
  }
  for (long k = 0; k < state_.num_servers; ++k)
    if (!state_.servers[k].busy) {
      state_.servers[k].idle_since = 0.0;
      policy_.on_idle(static_cast<int>(k), 0.0);
    }
  push_next_arrival();

  while (!heap_.empty() && heap_.top().t <= horizon_) {
    const Event ev = heap_.top();
    heap_.pop();

    int depart_server = -1;
    if (ev.kind == 0) {
      if (mech_.mode == ServiceMode::Pooled) {
        const int c = ev.idx;
        if (ev.epoch != class_epoch_[c]) continue;  // stale clock
        const auto& members = class_busy_[c];
        // uniform attribution within the class; lawful because members
        // share one rate
        const std::size_t j =
            members.size() == 1 ? 0 : service_rng_.uniform_index(members.size());
        depart_server = members[j];
      } else {
        depart_server = ev.idx;
        if (!state_.servers[depart_server].busy)
          throw EngineError("engine: departure for an idle server");
      }
    }

    for (auto* r : recorders_) r->before_event(ev.t, state_);
    state_.clock = ev.t;
    EventInfo info;
    if (ev.kind == 0)
      apply_departure(depart_server, ev.t, info);
    else
      apply_arrival(ev.t, info);
    ++events_;
    for (auto* r : recorders_) r->after_event(info, state_);
  }

  state_.clock = horizon_;
  for (auto* r : recorders_) r->finish(state_, horizon_);
}

void run_replication(const RunInputs& in, RngStream service_rng) {
  Engine eng(*in.env, *in.init, *in.policy, *in.arrivals, *in.mech, in.horizon,
             in.recorders, service_rng);
  eng.run();
}

}  // namespace hwsim
