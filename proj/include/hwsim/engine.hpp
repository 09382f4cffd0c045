#pragma once

#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "hwsim/arrivals.hpp"
#include "hwsim/environment.hpp"
#include "hwsim/policies.hpp"
#include "hwsim/random.hpp"

namespace hwsim {

struct EngineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ServerState {
  std::uint8_t busy = 0;
  std::uint8_t busy0 = 0;
  double idle_since = 0.0;      // meaningful while idle
  long long completions = 0;    // jobs finished by this server
  long long routings = 0;       // jobs handed to this server
};

// Aggregate counters plus per-server flags. The head count in system is
// always x() = x0 + arrivals_seen - total_completions; busy/queue splits are
// maintained incrementally and checked against it.
struct SystemState {
  double clock = 0.0;
  long n = 0;
  long num_servers = 0;
  long long x0 = 0;
  long long arrivals_seen = 0;
  long long queue_len = 0;
  long long busy_count = 0;
  long long total_completions = 0;
  long long total_routings = 0;
  std::vector<ServerState> servers;

  long long x() const { return x0 + arrivals_seen - total_completions; }
  long long idle_count() const { return num_servers - busy_count; }
};

// Full-scan consistency check: recomputes the aggregates from the per-server
// records and tests head count = queue + busy, the queue/idle split against
// the server-count threshold, and every per-server busy flag against its
// start flag and counters. Cheap enough to run per event in tests, run
// periodically in production paths.
struct InvariantReport {
  bool ok = true;
  std::string tag;     // first failed rule, empty when ok
  std::string detail;
  double t = 0.0;
};

InvariantReport verify_event_invariants(const SystemState& st);

// Service mechanism: per-server exponential clocks, or one pooled clock per
// equal-rate class with uniform attribution among its busy members. The
// pooled builder groups servers by exact realized rate, so continuous rate
// laws degenerate to singleton classes (still correct, no pooling win).
enum class ServiceMode { PerServer, Pooled };

struct RateClass {
  std::vector<int> members;
};

struct ServiceMechanism {
  ServiceMode mode = ServiceMode::PerServer;
  std::vector<RateClass> classes;  // pooled only; ascending by rate

  static ServiceMechanism per_server() { return {}; }
  static ServiceMechanism pooled(const EnvironmentRealization& env);
};

// What happened at one event, handed to recorders after the state settles.
struct EventInfo {
  enum class Kind : std::uint8_t { Arrival, Departure } kind = Kind::Arrival;
  double t = 0.0;
  int departed = -1;              // server that completed, departures only
  int routed = -1;                // server that received a job
  double routed_idle_since = 0.0; // start of the idle interval just closed
  bool queued = false;            // arrival found no idle server
};

class Recorder {
 public:
  virtual ~Recorder() = default;
  virtual void begin(const SystemState&) {}
  // called with the pre-event state; t is the event epoch
  virtual void before_event(double /*t*/, const SystemState&) {}
  virtual void after_event(const EventInfo&, const SystemState&) {}
  virtual void finish(const SystemState&, double /*horizon*/) {}
};

// Event-driven simulator for one replication. Ties are resolved
// deterministically: departures before arrivals at equal epochs, lower
// index (server or class) first among simultaneous departures.
class Engine {
 public:
  Engine(const EnvironmentRealization& env, const InitialState& init,
         RoutingPolicy& policy, ArrivalSource& arrivals,
         const ServiceMechanism& mech, double horizon,
         std::vector<Recorder*> recorders, RngStream service_rng);

  void run();
  const SystemState& state() const { return state_; }
  long long events_processed() const { return events_; }

 private:
  struct Event {
    double t;
    std::uint8_t kind;  // 0 departure/class firing, 1 arrival
    int idx;            // server or class index; unused for arrivals
    std::uint64_t epoch;
    bool operator>(const Event& o) const {
      if (t != o.t) return t > o.t;
      if (kind != o.kind) return kind > o.kind;
      return idx > o.idx;
    }
  };

  void start_service(int server, double t);
  void reschedule_class(int cls, double t);
  void apply_arrival(double t, EventInfo& info);
  void apply_departure(int server, double t, EventInfo& info);
  void push_next_arrival();

  const EnvironmentRealization& env_;
  RoutingPolicy& policy_;
  ArrivalSource& arrivals_;
  const ServiceMechanism& mech_;
  double horizon_;
  std::vector<Recorder*> recorders_;
  RngStream service_rng_;

  SystemState state_;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> heap_;

  // pooled bookkeeping
  std::vector<int> class_of_;                    // server -> class
  std::vector<std::vector<int>> class_busy_;     // busy members per class
  std::vector<int> slot_in_class_;               // server -> slot in class_busy_
  std::vector<double> class_rate_;               // sum of busy members' rates
  std::vector<std::uint64_t> class_epoch_;

  long long events_ = 0;
};

// Convenience runner used by drivers and tests.
struct RunInputs {
  const EnvironmentRealization* env = nullptr;
  const InitialState* init = nullptr;
  RoutingPolicy* policy = nullptr;
  ArrivalSource* arrivals = nullptr;
  const ServiceMechanism* mech = nullptr;
  double horizon = 0.0;
  std::vector<Recorder*> recorders;
};

void run_replication(const RunInputs& in, RngStream service_rng);

}  // namespace hwsim
