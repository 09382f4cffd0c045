#include "hwsim/policies.hpp"

namespace hwsim {

int p1_choose(const AvailableSet& avail) {
  int best = -1;
  double best_since = 0.0;
  for (const auto& e : avail.entries) {
    if (best < 0 || e.idle_since < best_since ||
        (e.idle_since == best_since && e.id < best)) {
      best = e.id;
      best_since = e.idle_since;
    }
  }
  return best;
}

int p2_choose(const AvailableSet& avail) {
  int best = -1;
  for (const auto& e : avail.entries)
    if (e.id > best) best = e.id;
  return best;
}

void UniformRandomPolicy::on_idle(int server, double) {
  if (pos_.size() <= static_cast<std::size_t>(server)) pos_.resize(server + 1, -1);
  pos_[server] = static_cast<int>(ids_.size());
  ids_.push_back(server);
}

int UniformRandomPolicy::pop(double) {
  const std::size_t j = ids_.size() == 1 ? 0 : rng_.uniform_index(ids_.size());
  const int id = ids_[j];
  ids_[j] = ids_.back();
  pos_[ids_[j]] = static_cast<int>(j);
  ids_.pop_back();
  pos_[id] = -1;
  return id;
}

}  // namespace hwsim
