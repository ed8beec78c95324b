#pragma once

// Seeded random instance generators shared by unit tests and the
// acceptance suite. All draws go through SplitMix-style steps on a
// uint64 state so corpora are identical across platforms.

#include <cstdint>
#include <string>
#include <vector>

#include "soatk/fincat.hpp"

namespace soatk::testsupport {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, n).
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(next() % n); }

 private:
  std::uint64_t state_;
};

inline std::vector<fincat::FiniteCategory> shape_pool() {
  return {fincat::terminal_category(), fincat::walking_arrow(), fincat::span_category(),
          fincat::chain2(), fincat::parallel_pair()};
}

/// Random set diagram over a random pool shape; value sets of size <= max_size.
inline fincat::SetDiagram random_set_diagram(Rng& rng, std::size_t max_size) {
  auto pool = shape_pool();
  fincat::SetDiagram d;
  d.base = pool[rng.below(pool.size())];
  for (const auto& o : d.base.objects) {
    const std::size_t n = rng.below(max_size + 1);
    auto& v = d.value[o];
    for (std::size_t i = 0; i < n; ++i) v.push_back({o, "e" + std::to_string(i)});
  }
  for (const auto& id : d.base.non_identity_morphisms()) {
    const auto& m = d.base.mor(id);
    const auto& tv = d.at(m.tgt);
    auto& fn = d.action[id];
    for (const auto& e : d.at(m.src)) {
      if (tv.empty()) {
        // No function exists into an empty set; retarget by clearing source.
        fn.clear();
        d.value[m.src].clear();
        break;
      }
      fn[e] = tv[rng.below(tv.size())];
    }
  }
  // Clearing a source above may break earlier actions; rebuild until stable.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& id : d.base.non_identity_morphisms()) {
      const auto& m = d.base.mor(id);
      auto& fn = d.action[id];
      for (const auto& e : d.at(m.src)) {
        auto it = fn.find(e);
        if (it == fn.end() || !std::binary_search(d.at(m.tgt).begin(), d.at(m.tgt).end(), it->second)) {
          if (d.at(m.tgt).empty()) {
            d.value[m.src].clear();
            fn.clear();
            changed = true;
            break;
          }
          fn[e] = d.at(m.tgt)[rng.below(d.at(m.tgt).size())];
          changed = true;
        }
      }
    }
  }
  // Parallel-pair composition table is empty; functoriality holds for free.
  // For chain shapes the composite action must be consistent: fix it up.
  for (const auto& g : d.base.non_identity_morphisms())
    for (const auto& f : d.base.non_identity_morphisms()) {
      const auto& mf = d.base.mor(f);
      const auto& mg = d.base.mor(g);
      if (mf.tgt != mg.src) continue;
      std::string gf;
      try {
        gf = d.base.compose(g, f);
      } catch (const std::exception&) {
        continue;
      }
      auto& fn = d.action[gf];
      for (const auto& e : d.at(mf.src)) fn[e] = d.apply(g, d.apply(f, e));
    }
  return d;
}

}  // namespace soatk::testsupport
