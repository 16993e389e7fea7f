#include "dsgda/data.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "dsgda/errors.hpp"
#include "dsgda/rng.hpp"

namespace dsgda {

namespace {
constexpr std::uint64_t kDataTag = 0xda7aULL;
constexpr std::uint64_t kSwapTag = 0x5a4bULL;
constexpr std::uint64_t kPopTag = 0x9097ULL;
const char* kSnapshotHeader = "dsgda-dataset v1";
}  // namespace

DistributedDataset::DistributedDataset(std::vector<std::vector<Sample>> locals,
                                       std::uint64_t seed)
    : locals_(std::move(locals)), seed_(seed) {
  if (locals_.empty()) throw std::invalid_argument("dataset needs at least one agent");
  const auto n = locals_.front().size();
  if (n == 0) throw std::invalid_argument("dataset needs at least one sample per agent");
  const auto dim = locals_.front().front().payload.size();
  for (const auto& l : locals_) {
    if (l.size() != n) throw DimensionError("agents hold different sample counts");
    for (const auto& s : l) {
      if (s.payload.size() != dim) throw DimensionError("samples have different payload sizes");
    }
  }
}

std::vector<Sample> DistributedDataset::pooled() const {
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(m()) * n());
  for (const auto& l : locals_) out.insert(out.end(), l.begin(), l.end());
  return out;
}

DistributedDataset generate(const MinimaxProblem& problem, int m, int n, std::uint64_t seed) {
  if (m < 1 || n < 1) {
    throw std::invalid_argument("generate needs m >= 1 and n >= 1, got m = " +
                                std::to_string(m) + ", n = " + std::to_string(n));
  }
  std::vector<std::vector<Sample>> locals(m);
  for (int i = 0; i < m; ++i) {
    Rng rng(hash_key(kDataTag, seed, static_cast<std::uint64_t>(i)));
    locals[i].reserve(n);
    for (int j = 0; j < n; ++j) locals[i].push_back(problem.draw(rng, i, m));
  }
  return DistributedDataset(std::move(locals), seed);
}

NeighborPair make_neighbor(const MinimaxProblem& problem, const DistributedDataset& S,
                           std::uint64_t seed) {
  NeighborPair pair{S, S, std::vector<int>(S.m())};
  for (int i = 0; i < S.m(); ++i) {
    Rng rng(hash_key(kSwapTag, seed, static_cast<std::uint64_t>(i)));
    const int r = static_cast<int>(rng.below(static_cast<std::uint64_t>(S.n())));
    Sample fresh = problem.draw(rng, i, S.m());
    while (fresh == S.at(i, r)) fresh = problem.draw(rng, i, S.m());
    pair.S_prime.locals()[i][r] = std::move(fresh);
    pair.replaced[i] = r;
  }
  return pair;
}

std::vector<Sample> population_draws(const MinimaxProblem& problem, int m, int count,
                                     std::uint64_t seed) {
  Rng rng(hash_key(kPopTag, seed));
  std::vector<Sample> out;
  out.reserve(count);
  for (int c = 0; c < count; ++c) {
    const int agent = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
    out.push_back(problem.draw(rng, agent, m));
  }
  return out;
}

void save_snapshot(const std::string& path, const DistributedDataset& S) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write snapshot '" + path + "'");
  out << kSnapshotHeader << "\n";
  out << S.m() << " " << S.n() << " " << S.seed() << " " << S.at(0, 0).payload.size() << "\n";
  out << std::setprecision(17);
  for (int i = 0; i < S.m(); ++i) {
    for (const auto& s : S.local(i)) {
      for (int c = 0; c < s.payload.size(); ++c) out << (c ? " " : "") << s.payload[c];
      out << "\n";
    }
  }
}

DistributedDataset load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot '" + path + "'");
  std::string header;
  std::getline(in, header);
  if (header != kSnapshotHeader) {
    throw std::invalid_argument(path + ": not a dataset snapshot");
  }
  int m = 0, n = 0, dim = 0;
  std::uint64_t seed = 0;
  if (!(in >> m >> n >> seed >> dim) || m < 1 || n < 1 || dim < 1) {
    throw std::invalid_argument(path + ": malformed snapshot header");
  }
  std::vector<std::vector<Sample>> locals(m, std::vector<Sample>(n, Sample{Vec(dim)}));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int c = 0; c < dim; ++c) {
        if (!(in >> locals[i][j].payload[c])) {
          throw std::invalid_argument(path + ": snapshot payload ends early");
        }
      }
    }
  }
  return DistributedDataset(std::move(locals), seed);
}

}  // namespace dsgda
