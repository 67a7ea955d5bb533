#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rclt/rational.hpp"

namespace rclt {

enum class Objective { sup, inf };

/// One backward layer of the worst-case recursion:
///   out[i] = best_q sum_w probs[q][w] * next[child(i, q, w)]
/// child(i, q, w) = children[i * stride + (q_dependent ? q * outcomes : 0) + w].
/// best[i] receives the chosen law (first index on ties).
template <class Value>
struct LayerBackup {
  std::span<const std::uint32_t> children;
  std::size_t stride = 0;
  std::size_t outcomes = 0;
  bool q_dependent = false;
  std::span<const std::vector<Value>> probs;  // [law][outcome]
  std::span<const Value> next;
  Objective objective = Objective::sup;
};

template <class Value>
void backup_layer_serial(const LayerBackup<Value>& in, std::span<Value> out,
                         std::span<std::uint8_t> best);

template <class Value>
void backup_layer_parallel(const LayerBackup<Value>& in, std::span<Value> out,
                           std::span<std::uint8_t> best);

/// Sets the OpenMP worker count used by every parallel kernel; 0 leaves the
/// runtime default.
void set_thread_cap(int threads);
int thread_cap();

}  // namespace rclt
