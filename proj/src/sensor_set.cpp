#include "rselab/sensor_set.hpp"

#include <algorithm>
#include <sstream>

#include "rselab/error.hpp"

namespace rselab {

SensorSet::SensorSet(int universe, std::vector<int> indices)
    : universe_(universe), indices_(std::move(indices)) {
  if (universe < 0) throw Error(ErrorCode::InvalidArgument, "negative sensor count");
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    const int i = indices_[k];
    if (i < 0 || i >= universe) {
      throw Error(ErrorCode::InvalidArgument,
                  "sensor index " + std::to_string(i + 1) + " outside 1.." + std::to_string(universe));
    }
    if (k > 0 && indices_[k - 1] >= i) {
      throw Error(ErrorCode::InvalidArgument, "sensor indices must be strictly increasing");
    }
  }
}

SensorSet SensorSet::all(int universe) {
  std::vector<int> idx(static_cast<std::size_t>(std::max(universe, 0)));
  for (int i = 0; i < universe; ++i) idx[static_cast<std::size_t>(i)] = i;
  return SensorSet(universe, std::move(idx));
}

SensorSet SensorSet::none(int universe) { return SensorSet(universe, std::vector<int>{}); }

SensorSet SensorSet::from_unsorted(int universe, std::vector<int> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return SensorSet(universe, std::move(indices));
}

SensorSet SensorSet::from_one_based(int universe, const std::vector<int>& numbers) {
  std::vector<int> idx;
  idx.reserve(numbers.size());
  for (int s : numbers) idx.push_back(s - 1);
  return from_unsorted(universe, std::move(idx));
}

SensorSet SensorSet::from_mask(int universe, std::uint64_t mask) {
  std::vector<int> idx;
  for (int i = 0; i < universe && i < 64; ++i) {
    if (mask & (std::uint64_t{1} << i)) idx.push_back(i);
  }
  return SensorSet(universe, std::move(idx));
}

bool SensorSet::contains(int i) const noexcept {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

std::vector<int> SensorSet::one_based() const {
  std::vector<int> out;
  out.reserve(indices_.size());
  for (int i : indices_) out.push_back(i + 1);
  return out;
}

std::uint64_t SensorSet::mask() const {
  std::uint64_t m = 0;
  for (int i : indices_) {
    if (i < 64) m |= std::uint64_t{1} << i;
  }
  return m;
}

SensorSet SensorSet::complement() const {
  std::vector<int> out;
  for (int i = 0; i < universe_; ++i) {
    if (!contains(i)) out.push_back(i);
  }
  return SensorSet(universe_, std::move(out));
}

SensorSet SensorSet::unite(const SensorSet& other) const {
  if (other.universe_ != universe_) throw Error(ErrorCode::InvalidArgument, "sensor universe mismatch");
  std::vector<int> out;
  std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                 std::back_inserter(out));
  return SensorSet(universe_, std::move(out));
}

SensorSet SensorSet::intersect(const SensorSet& other) const {
  if (other.universe_ != universe_) throw Error(ErrorCode::InvalidArgument, "sensor universe mismatch");
  std::vector<int> out;
  std::set_intersection(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                        std::back_inserter(out));
  return SensorSet(universe_, std::move(out));
}

bool SensorSet::is_subset_of(const SensorSet& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(), indices_.end());
}

std::string SensorSet::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (k) os << ',';
    os << indices_[k] + 1;
  }
  os << '}';
  return os.str();
}

std::vector<SensorSet> subsets_of_size(int universe, int k) {
  std::vector<SensorSet> out;
  if (k < 0 || k > universe) return out;
  std::vector<int> pick(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.emplace_back(universe, pick);
    int j = k - 1;
    while (j >= 0 && pick[static_cast<std::size_t>(j)] == universe - k + j) --j;
    if (j < 0) break;
    ++pick[static_cast<std::size_t>(j)];
    for (int l = j + 1; l < k; ++l) pick[static_cast<std::size_t>(l)] = pick[static_cast<std::size_t>(l - 1)] + 1;
  }
  return out;
}

}  // namespace rselab
