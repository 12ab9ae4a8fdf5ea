#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "lak/error.hpp"
#include "lak/executor.hpp"
#include "lak/hash.hpp"

// In-process partitioned datasets. Records are (key, value) pairs placed in
// partition fnv1a64(key bytes) % P, in insertion order. Every transformation
// returns a new dataset; partitions are independent units of work that an
// Executor may run on any number of threads, and results are always merged
// in partition-index order, so outputs never depend on the worker count.
namespace lak::dataflow {

// ---------------------------------------------------------------------------
// Keys
// ---------------------------------------------------------------------------

// Canonical key bytes. A top-level string hashes as its raw bytes; integers
// as 8 little-endian bytes; pairs as the length-prefixed concatenation.
inline void append_key_bytes(std::string& out, std::string_view s) { out.append(s); }

template <std::integral I>
void append_key_bytes(std::string& out, I v) {
  const auto u = static_cast<std::uint64_t>(static_cast<std::int64_t>(v));
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((u >> (8 * i)) & 0xffU));
}

template <class A, class B>
void append_key_bytes(std::string& out, const std::pair<A, B>& p);

template <class K>
concept PartitionKey = std::totally_ordered<K> && std::copyable<K> && requires(std::string& out, const K& k) {
  append_key_bytes(out, k);
};

template <class A, class B>
void append_key_bytes(std::string& out, const std::pair<A, B>& p) {
  std::string a, b;
  append_key_bytes(a, p.first);
  append_key_bytes(b, p.second);
  append_key_bytes(out, static_cast<std::uint64_t>(a.size()));
  out += a;
  out += b;
}

template <PartitionKey K>
std::uint64_t key_hash(const K& key) {
  std::string bytes;
  append_key_bytes(bytes, key);
  return fnv1a64(bytes);
}

using lak::Executor;

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

template <PartitionKey K, class V>
class PartitionedDataset {
 public:
  using Key = K;
  using Value = V;
  using Record = std::pair<K, V>;
  using Partition = std::vector<Record>;

  static std::size_t partition_of(const K& key, std::size_t num_partitions) {
    return static_cast<std::size_t>(key_hash(key) % num_partitions);
  }

  static PartitionedDataset from_records(std::vector<Record> records, std::size_t num_partitions,
                                         std::string lineage = "source") {
    if (num_partitions == 0) throw InvalidArgument("partition count must be at least 1");
    std::vector<Partition> parts(num_partitions);
    for (auto& r : records) parts[partition_of(r.first, num_partitions)].push_back(std::move(r));
    return PartitionedDataset(std::move(parts), std::move(lineage));
  }

  // Partitions must already satisfy the placement invariant.
  PartitionedDataset(std::vector<Partition> partitions, std::string lineage)
      : parts_(std::move(partitions)), lineage_(std::move(lineage)) {
    if (parts_.empty()) throw InvalidArgument("partition count must be at least 1");
  }

  [[nodiscard]] std::size_t num_partitions() const { return parts_.size(); }
  [[nodiscard]] const std::vector<Partition>& partitions() const { return parts_; }
  [[nodiscard]] const Partition& partition(std::size_t i) const { return parts_.at(i); }
  [[nodiscard]] const std::string& lineage() const { return lineage_; }

  [[nodiscard]] std::size_t size() const {
    std::size_t n = 0;
    for (const auto& p : parts_) n += p.size();
    return n;
  }
  [[nodiscard]] bool empty() const { return size() == 0; }

 private:
  std::vector<Partition> parts_;
  std::string lineage_;
};

namespace detail {

// Routes per-partition outputs to their target partitions, visiting source
// partitions in index order so placement order is deterministic.
template <class K, class V>
std::vector<std::vector<std::pair<K, V>>> shuffle(std::vector<std::vector<std::pair<K, V>>>&& outputs,
                                                  std::size_t num_partitions) {
  std::vector<std::vector<std::pair<K, V>>> parts(num_partitions);
  for (auto& out : outputs) {
    for (auto& r : out) {
      parts[PartitionedDataset<K, V>::partition_of(r.first, num_partitions)].push_back(std::move(r));
    }
  }
  return parts;
}

template <class T>
struct PairTraits;
template <class A, class B>
struct PairTraits<std::pair<A, B>> {
  using First = A;
  using Second = B;
};

}  // namespace detail

// f(const Partition&) -> std::vector<std::pair<K2, V2>>. Outputs are
// re-placed by key hash, so f may change keys.
template <PartitionKey K, class V, class F>
auto map_partitions(const PartitionedDataset<K, V>& ds, F&& f, const Executor& exec = Executor{}) {
  using Out = std::invoke_result_t<F&, const typename PartitionedDataset<K, V>::Partition&>;
  using Rec = typename Out::value_type;
  using K2 = typename detail::PairTraits<Rec>::First;
  using V2 = typename detail::PairTraits<Rec>::Second;
  static_assert(PartitionKey<K2>, "map_partitions output key is not a PartitionKey");
  std::vector<Out> outputs(ds.num_partitions());
  exec.run(ds.num_partitions(), [&](std::size_t i) { outputs[i] = f(ds.partition(i)); });
  return PartitionedDataset<K2, V2>(detail::shuffle<K2, V2>(std::move(outputs), ds.num_partitions()),
                                    ds.lineage() + " > map_partitions");
}

// f(const K&, const V&) -> V2; keys and placement unchanged.
template <PartitionKey K, class V, class F>
auto map_values(const PartitionedDataset<K, V>& ds, F&& f, const Executor& exec = Executor{}) {
  using V2 = std::invoke_result_t<F&, const K&, const V&>;
  std::vector<std::vector<std::pair<K, V2>>> parts(ds.num_partitions());
  exec.run(ds.num_partitions(), [&](std::size_t i) {
    const auto& in = ds.partition(i);
    auto& out = parts[i];
    out.reserve(in.size());
    for (const auto& [k, v] : in) out.emplace_back(k, f(k, v));
  });
  return PartitionedDataset<K, V2>(std::move(parts), ds.lineage() + " > map_values");
}

// f(const K&, const V&) -> std::vector<std::pair<K2, V2>>.
template <PartitionKey K, class V, class F>
auto flat_map(const PartitionedDataset<K, V>& ds, F&& f, const Executor& exec = Executor{}) {
  using Out = std::invoke_result_t<F&, const K&, const V&>;
  auto result = map_partitions(
      ds,
      [&](const typename PartitionedDataset<K, V>::Partition& part) {
        Out out;
        for (const auto& [k, v] : part) {
          auto produced = f(k, v);
          for (auto& r : produced) out.push_back(std::move(r));
        }
        return out;
      },
      exec);
  return result;
}

template <PartitionKey K, class V, class Pred>
PartitionedDataset<K, V> filter(const PartitionedDataset<K, V>& ds, Pred&& pred, const Executor& exec = Executor{}) {
  std::vector<typename PartitionedDataset<K, V>::Partition> parts(ds.num_partitions());
  exec.run(ds.num_partitions(), [&](std::size_t i) {
    for (const auto& r : ds.partition(i)) {
      if (pred(r.first, r.second)) parts[i].push_back(r);
    }
  });
  return PartitionedDataset<K, V>(std::move(parts), ds.lineage() + " > filter");
}

// Re-places every record for a new partition count.
template <PartitionKey K, class V>
PartitionedDataset<K, V> repartition(const PartitionedDataset<K, V>& ds, std::size_t num_partitions) {
  std::vector<std::vector<std::pair<K, V>>> outputs(ds.partitions().begin(), ds.partitions().end());
  return PartitionedDataset<K, V>(detail::shuffle<K, V>(std::move(outputs), num_partitions),
                                  ds.lineage() + " > repartition");
}

enum class JoinKind { Inner, LeftOuter };

template <class L, class R>
struct Joined {
  L left;
  std::optional<R> right;  // always set for inner joins

  friend bool operator==(const Joined&, const Joined&) = default;
};

// Co-partitioned hash join. Output placement follows the left side; for each
// left record, matches appear in right insertion order.
template <PartitionKey K, class L, class R>
PartitionedDataset<K, Joined<L, R>> join_by_key(const PartitionedDataset<K, L>& left,
                                                const PartitionedDataset<K, R>& right, JoinKind kind = JoinKind::Inner,
                                                const Executor& exec = Executor{}) {
  const PartitionedDataset<K, R> aligned =
      right.num_partitions() == left.num_partitions() ? right : repartition(right, left.num_partitions());
  std::vector<std::vector<std::pair<K, Joined<L, R>>>> parts(left.num_partitions());
  exec.run(left.num_partitions(), [&](std::size_t i) {
    std::map<K, std::vector<const R*>> index;
    for (const auto& [k, v] : aligned.partition(i)) index[k].push_back(&v);
    for (const auto& [k, v] : left.partition(i)) {
      const auto it = index.find(k);
      if (it == index.end()) {
        if (kind == JoinKind::LeftOuter) parts[i].emplace_back(k, Joined<L, R>{v, std::nullopt});
        continue;
      }
      for (const R* r : it->second) parts[i].emplace_back(k, Joined<L, R>{v, *r});
    }
  });
  return PartitionedDataset<K, Joined<L, R>>(std::move(parts), left.lineage() + " > join(" + right.lineage() + ")");
}

// fold(Acc&, const V&) within a partition, in record order; merge(Acc&, const
// Acc&) across partitions, in partition-index order. fold/merge must form a
// commutative monoid with `zero` for results to be partition-count invariant.
template <PartitionKey K, class V, class Acc, class Fold, class Merge>
std::map<K, Acc> aggregate_by_key(const PartitionedDataset<K, V>& ds, const Acc& zero, Fold&& fold, Merge&& merge,
                                  const Executor& exec = Executor{}) {
  std::vector<std::map<K, Acc>> partials(ds.num_partitions());
  exec.run(ds.num_partitions(), [&](std::size_t i) {
    auto& acc = partials[i];
    for (const auto& [k, v] : ds.partition(i)) {
      auto it = acc.find(k);
      if (it == acc.end()) it = acc.emplace(k, zero).first;
      fold(it->second, v);
    }
  });
  std::map<K, Acc> result;
  for (auto& partial : partials) {
    for (auto& [k, a] : partial) {
      auto it = result.find(k);
      if (it == result.end()) {
        result.emplace(k, std::move(a));
      } else {
        merge(it->second, a);
      }
    }
  }
  return result;
}

enum class Ordering { ByKey, ByPartition };

// ByKey is total: records are ordered by key, then by value when values are
// totally ordered. Otherwise ties keep by-partition order, which is
// partition-count invariant as long as a key's records were only ever placed
// by that key (no key-changing map fed more than one source partition).
template <PartitionKey K, class V>
std::vector<std::pair<K, V>> collect(const PartitionedDataset<K, V>& ds, Ordering ordering = Ordering::ByKey) {
  std::vector<std::pair<K, V>> out;
  out.reserve(ds.size());
  for (const auto& p : ds.partitions()) out.insert(out.end(), p.begin(), p.end());
  if (ordering == Ordering::ByKey) {
    if constexpr (std::totally_ordered<V>) {
      std::stable_sort(out.begin(), out.end());
    } else {
      std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    }
  }
  return out;
}

}  // namespace lak::dataflow
