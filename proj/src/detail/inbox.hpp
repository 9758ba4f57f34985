#pragma once

#include <algorithm>
#include <span>
#include <string>

#include "dterm/types.hpp"

namespace dterm::detail {

// The inbox must match the neighbor list one-to-one and carry end-of-(t-1) snapshots.
template <class Message>
void check_inbox(std::span<const Message> inbox, std::span<const AgentId> neighbors,
                 std::size_t agent_count, Iteration t) {
  if (inbox.size() != neighbors.size()) {
    throw ContractError("inbox holds " + std::to_string(inbox.size()) + " messages for " +
                        std::to_string(neighbors.size()) + " neighbors");
  }
  for (std::size_t a = 0; a < inbox.size(); ++a) {
    const auto& msg = inbox[a];
    if (std::find(neighbors.begin(), neighbors.end(), msg.sender) == neighbors.end()) {
      throw ContractError("message from non-neighbor " + std::to_string(msg.sender));
    }
    if (msg.stamped != t - 1) {
      throw ContractError("message from " + std::to_string(msg.sender) + " stamped " +
                          std::to_string(msg.stamped) + ", expected " + std::to_string(t - 1));
    }
    if (msg.v.size() != agent_count) throw ContractError("message vector length mismatch");
    for (std::size_t b = a + 1; b < inbox.size(); ++b) {
      if (inbox[b].sender == msg.sender) {
        throw ContractError("duplicate message from " + std::to_string(msg.sender));
      }
    }
  }
}

}  // namespace dterm::detail
