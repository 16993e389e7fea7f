#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dsgda/problems.hpp"

namespace dsgda {

class DistributedDataset {
 public:
  DistributedDataset() = default;
  DistributedDataset(std::vector<std::vector<Sample>> locals, std::uint64_t seed);

  int m() const { return static_cast<int>(locals_.size()); }
  int n() const { return locals_.empty() ? 0 : static_cast<int>(locals_.front().size()); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Sample>& local(int i) const { return locals_.at(i); }
  const Sample& at(int i, int j) const { return locals_.at(i).at(j); }
  std::vector<std::vector<Sample>>& locals() { return locals_; }
  // All m*n samples, agent-major.
  std::vector<Sample> pooled() const;

 private:
  std::vector<std::vector<Sample>> locals_;
  std::uint64_t seed_ = 0;
};

// S and S' differ in exactly one sample per agent: S'_i[replaced[i]] != S_i[replaced[i]].
struct NeighborPair {
  DistributedDataset S;
  DistributedDataset S_prime;
  std::vector<int> replaced;
};

// Per-agent streams are derived from (seed, agent), so agent i's data does not
// depend on m beyond the center it is assigned.
DistributedDataset generate(const MinimaxProblem& problem, int m, int n, std::uint64_t seed);

NeighborPair make_neighbor(const MinimaxProblem& problem, const DistributedDataset& S,
                           std::uint64_t seed);

// Fresh draws from the population mixture (agent uniform, then its local law).
std::vector<Sample> population_draws(const MinimaxProblem& problem, int m, int count,
                                     std::uint64_t seed);

// Snapshot: header line, then "m n seed payload_dim", then one sample per line.
void save_snapshot(const std::string& path, const DistributedDataset& S);
DistributedDataset load_snapshot(const std::string& path);

}  // namespace dsgda
