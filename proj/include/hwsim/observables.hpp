#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "hwsim/engine.hpp"
#include "hwsim/environment.hpp"

namespace hwsim {

// One grid sample of the head count and its queue/idle split.
struct GridSample {
  double t = 0.0;
  long long x = 0;
  long long q = 0;
  long long idle = 0;
};

struct IdleInterval {
  double start = 0.0;
  double end = 0.0;
};

// Everything a replication leaves behind: right-continuous grid samples,
// per-server closed idle intervals (zero-length ones included), open idle
// starts at the horizon, counters, and the optional fast-idle tracker.
struct PathRecord {
  long n = 0;
  long num_servers = 0;
  double horizon = 0.0;
  double sample_dt = 0.0;
  std::vector<GridSample> samples;
  std::vector<std::vector<IdleInterval>> idle_intervals;
  std::vector<std::optional<double>> open_idle_since;
  std::vector<EventInfo> events;  // only when requested
  long long arrivals = 0;
  long long completions = 0;
  long long routings = 0;
  // sup over grid of (idle servers with base rate >= threshold) / sqrt(n)
  double fast_idle_sup = 0.0;
};

struct RecorderOptions {
  double sample_dt = 0.01;
  bool record_intervals = true;
  bool record_events = false;
  std::optional<double> fast_tilde_min;
};

// Samples the state on the uniform grid {0, dt, 2dt, ..., <= horizon} with
// right-continuous semantics: a grid point shared with an event epoch takes
// the post-event state.
class PathRecorder final : public Recorder {
 public:
  PathRecorder(const EnvironmentRealization& env, const RecorderOptions& opt,
               double horizon);
  void begin(const SystemState& st) override;
  void before_event(double t, const SystemState& st) override;
  void after_event(const EventInfo& info, const SystemState& st) override;
  void finish(const SystemState& st, double horizon) override;

  PathRecord take() { return std::move(rec_); }
  const PathRecord& record() const { return rec_; }

 private:
  double grid_t(long i) const { return static_cast<double>(i) * opt_.sample_dt; }
  void emit(double t, const SystemState& st);

  const EnvironmentRealization& env_;
  RecorderOptions opt_;
  PathRecord rec_;
  long next_ = 0;
  long grid_count_ = 0;
  long long fast_idle_ = 0;
};

// Per-event consistency guard. Aggregate identities are checked after every
// event in O(1); a full per-server scan runs every [stride] events and at
// the end. Violations throw EngineError (and are counted for reporting).
class InvariantRecorder final : public Recorder {
 public:
  explicit InvariantRecorder(long long stride = 4096, bool throw_on_violation = true)
      : stride_(stride), throw_(throw_on_violation) {}
  void begin(const SystemState& st) override { check_full(st); }
  void after_event(const EventInfo& info, const SystemState& st) override;
  void finish(const SystemState& st, double) override { check_full(st); }

  long long violations() const { return violations_; }
  const InvariantReport& first_failure() const { return first_; }

 private:
  void check_full(const SystemState& st);
  void fail(const InvariantReport& rep);

  long long stride_;
  bool throw_;
  long long since_ = 0;
  long long violations_ = 0;
  InvariantReport first_;
};

// Diffusion-scaled path: xhat = (x - N)/sqrt(n), and the queue/idle parts.
struct ScaledPoint {
  double t = 0.0;
  double xhat = 0.0;
  double qhat = 0.0;
  double ihat = 0.0;
};

std::vector<ScaledPoint> scale_path(const PathRecord& rec);

// Scaled head count at one grid time; throws std::out_of_range when t is not
// a grid point inside the horizon.
double xhat_at(const PathRecord& rec, double t);

// Idle periods completed in [s, t]: for every server whose latest completed
// idle period ended inside the window, take that period's length; report the
// extremes and the number of such servers. nullopt when no server qualifies.
struct IdleWindowStats {
  double sup_len = 0.0;
  double inf_len = 0.0;
  long count = 0;
};

std::optional<IdleWindowStats> idle_window_stats(const PathRecord& rec, double s,
                                                 double t);

// Fairness observable: window [s, s + c*n^(-1/4)], lengths scaled by sqrt(n).
struct FairnessSample {
  double t_n = 0.0;
  double sup_scaled = 0.0;
  double inf_scaled = 0.0;
  long count = 0;
};

std::optional<FairnessSample> fairness_from_path(const PathRecord& rec, double s,
                                                 double c);

}  // namespace hwsim
