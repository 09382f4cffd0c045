#pragma once

#include <deque>
#include <set>
#include <vector>

#include "hwsim/random.hpp"

namespace hwsim {

// Snapshot view of the available (idle) servers, used by the pure choosers
// and as the brute-force oracle for the incremental policy structures.
struct AvailableEntry {
  int id = 0;
  double idle_since = 0.0;
  double rate = 0.0;
};

struct AvailableSet {
  std::vector<AvailableEntry> entries;
};

// Longest idle first, ties to the lowest id. Returns -1 on empty.
int p1_choose(const AvailableSet& avail);

// Highest id first (callers label servers ascending by rate, so the highest
// id is a fastest server). Returns -1 on empty.
int p2_choose(const AvailableSet& avail);

// Incremental policy interface driven by the engine: servers enter when they
// go idle and leave when routed to. pop() is only called on a nonempty set.
class RoutingPolicy {
 public:
  virtual ~RoutingPolicy() = default;
  virtual void on_idle(int server, double t) = 0;
  virtual int pop(double t) = 0;
  virtual bool empty() const = 0;
  // engines check this to enforce the rate-sorted labeling precondition
  virtual bool wants_rate_sorted() const { return false; }
};

// FIFO queue of idle servers: entered when idleness began, served from the
// front. Equal-time entries keep insertion order, which the engine produces
// in ascending server id.
class P1LongestIdle final : public RoutingPolicy {
 public:
  void on_idle(int server, double t) override { fifo_.push_back({server, t}); }
  int pop(double) override {
    const int id = fifo_.front().id;
    fifo_.pop_front();
    return id;
  }
  bool empty() const override { return fifo_.empty(); }
  // age of the queue head, for diagnostics
  double head_idle_since() const { return fifo_.front().since; }

 private:
  struct Entry {
    int id;
    double since;
  };
  std::deque<Entry> fifo_;
};

// Max-id set over idle servers.
class P2FastestFirst final : public RoutingPolicy {
 public:
  void on_idle(int server, double) override { ids_.insert(server); }
  int pop(double) override {
    auto it = std::prev(ids_.end());
    const int id = *it;
    ids_.erase(it);
    return id;
  }
  bool empty() const override { return ids_.empty(); }
  bool wants_rate_sorted() const override { return true; }

 private:
  std::set<int> ids_;
};

// Uniform random over idle servers; the comparison baseline.
class UniformRandomPolicy final : public RoutingPolicy {
 public:
  explicit UniformRandomPolicy(RngStream rng) : rng_(rng) {}
  void on_idle(int server, double) override;
  int pop(double) override;
  bool empty() const override { return ids_.empty(); }

 private:
  std::vector<int> ids_;
  std::vector<int> pos_;  // server id -> slot in ids_, -1 when absent
  RngStream rng_;
};

}  // namespace hwsim
