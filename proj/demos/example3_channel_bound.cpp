// Bounds the quantum capacity of the channel whose Choi state is the graph
// marginal on K7, then compares against a few textbook channels.

#include <cstdio>

#include "redbound/redbound.hpp"

using namespace redbound;

namespace {

void show(const char* name, const Channel& c, std::size_t min_discarded) {
  SearchConfig cfg;
  cfg.min_discarded = min_discarded;
  const BoundReport r = certified_channel_bound(c, Quantity::ChannelCapacity, cfg);
  if (r.certified)
    std::printf("%-22s Q bound %.4f bits (discarding %zu output factor(s))\n", name, r.bound_bits,
                r.plan.discarded_parts.size());
  else
    std::printf("%-22s no certificate (best residual %.3g)\n", name, r.certificate.residual);
}

}  // namespace

int main() {
  show("graph channel", example3_channel(), 1);
  show("identity", identity_channel(2), 0);
  show("depolarizing p=0.8", depolarizing_channel(0.8), 0);
  show("fully depolarizing", fully_depolarizing_channel(2), 0);
  return 0;
}
