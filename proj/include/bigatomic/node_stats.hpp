#pragma once

#include <cstdint>

#include "bigatomic/thread_registry.hpp"

namespace bigatomic {

// Live-node accounting per node type: allocations minus frees.
template <class Node>
struct node_stats {
  static sharded_counter& live() {
    static sharded_counter c;
    return c;
  }
  static sharded_counter& allocated() {
    static sharded_counter c;
    return c;
  }
  static std::int64_t live_count() { return live().sum(); }
  static std::int64_t allocated_count() { return allocated().sum(); }
};

// Heap node that tracks itself in node_stats.
template <class Derived>
struct counted_node {
  counted_node() {
    node_stats<Derived>::live().add(1);
    node_stats<Derived>::allocated().add(1);
  }
  counted_node(const counted_node&) = delete;
  counted_node& operator=(const counted_node&) = delete;
  ~counted_node() { node_stats<Derived>::live().add(-1); }
};

}  // namespace bigatomic
