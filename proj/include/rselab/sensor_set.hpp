#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace rselab {

/// Ordered subset of the sensor indices {0, ..., p-1}.
///
/// Indices are zero-based inside the library. Configuration files, reports
/// and the CLI use one-based sensor numbers; convert with `from_one_based`
/// and `one_based()`.
class SensorSet {
 public:
  SensorSet() = default;

  /// Throws Error(InvalidArgument) unless `indices` is strictly increasing
  /// and inside [0, universe).
  SensorSet(int universe, std::vector<int> indices);
  SensorSet(int universe, std::initializer_list<int> indices)
      : SensorSet(universe, std::vector<int>(indices)) {}

  static SensorSet all(int universe);
  static SensorSet none(int universe);
  /// Accepts unsorted input with duplicates.
  static SensorSet from_unsorted(int universe, std::vector<int> indices);
  static SensorSet from_one_based(int universe, const std::vector<int>& numbers);
  static SensorSet from_mask(int universe, std::uint64_t mask);

  int universe() const noexcept { return universe_; }
  int size() const noexcept { return static_cast<int>(indices_.size()); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(int i) const noexcept;

  const std::vector<int>& indices() const noexcept { return indices_; }
  std::vector<int> one_based() const;
  std::uint64_t mask() const;

  SensorSet complement() const;
  SensorSet unite(const SensorSet& other) const;
  SensorSet intersect(const SensorSet& other) const;
  bool is_subset_of(const SensorSet& other) const;

  std::vector<int>::const_iterator begin() const { return indices_.begin(); }
  std::vector<int>::const_iterator end() const { return indices_.end(); }

  /// "{1,3}" in one-based numbering.
  std::string to_string() const;

  friend bool operator==(const SensorSet&, const SensorSet&) = default;

 private:
  int universe_ = 0;
  std::vector<int> indices_;
};

/// All subsets of {0..p-1} with exactly k elements, lexicographic order.
std::vector<SensorSet> subsets_of_size(int universe, int k);

}  // namespace rselab
