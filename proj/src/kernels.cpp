#include "rclt/kernels.hpp"

#include <omp.h>

namespace rclt {

namespace {

template <class Value>
void backup_state(const LayerBackup<Value>& in, std::size_t i, Value& out, std::uint8_t& best) {
  const std::size_t laws = in.probs.size();
  const std::uint32_t* base = in.children.data() + i * in.stride;
  Value acc;
  for (std::size_t q = 0; q < laws; ++q) {
    const std::uint32_t* kids = base + (in.q_dependent ? q * in.outcomes : 0);
    const auto& p = in.probs[q];
    acc = 0;
    for (std::size_t w = 0; w < in.outcomes; ++w) acc += p[w] * in.next[kids[w]];
    const bool better = q == 0 || (in.objective == Objective::sup ? acc > out : acc < out);
    if (better) {
      out = acc;
      best = static_cast<std::uint8_t>(q);
    }
  }
}

}  // namespace

template <class Value>
void backup_layer_serial(const LayerBackup<Value>& in, std::span<Value> out,
                         std::span<std::uint8_t> best) {
  for (std::size_t i = 0; i < out.size(); ++i) backup_state(in, i, out[i], best[i]);
}

template <class Value>
void backup_layer_parallel(const LayerBackup<Value>& in, std::span<Value> out,
                           std::span<std::uint8_t> best) {
  const auto count = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static) if (count > 256)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    backup_state(in, k, out[k], best[k]);
  }
}

template void backup_layer_serial<double>(const LayerBackup<double>&, std::span<double>,
                                          std::span<std::uint8_t>);
template void backup_layer_parallel<double>(const LayerBackup<double>&, std::span<double>,
                                            std::span<std::uint8_t>);
template void backup_layer_serial<Rational>(const LayerBackup<Rational>&, std::span<Rational>,
                                            std::span<std::uint8_t>);
template void backup_layer_parallel<Rational>(const LayerBackup<Rational>&, std::span<Rational>,
                                              std::span<std::uint8_t>);

namespace {
int g_thread_cap = 0;
}

void set_thread_cap(int threads) {
  g_thread_cap = threads;
  if (threads > 0) omp_set_num_threads(threads);
}

int thread_cap() { return g_thread_cap > 0 ? g_thread_cap : omp_get_max_threads(); }

}  // namespace rclt
