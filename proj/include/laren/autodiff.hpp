// Copyright 2026 The LAREN Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "laren/tensor.hpp"

namespace laren {

/// Named tensors, iterated in lexicographic name order.
class ParameterSet {
 public:
  using Map = std::map<std::string, Tensor>;

  void set(const std::string& name, Tensor value) { tensors_[name] = std::move(value); }
  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }
  const Tensor& at(const std::string& name) const;
  Tensor& at(const std::string& name);
  void erase(const std::string& name) { tensors_.erase(name); }

  /// Copies every tensor whose name starts with `prefix` into this set.
  void merge(const ParameterSet& other, const std::string& prefix = "");

  std::size_t size() const { return tensors_.size(); }
  Eigen::Index element_count() const;
  Map::const_iterator begin() const { return tensors_.begin(); }
  Map::const_iterator end() const { return tensors_.end(); }
  Map::iterator begin() { return tensors_.begin(); }
  Map::iterator end() { return tensors_.end(); }

  friend bool operator==(const ParameterSet& a, const ParameterSet& b) {
    return a.tensors_ == b.tensors_;
  }

 private:
  Map tensors_;
};

using GradientMap = std::map<std::string, Tensor>;

class Graph;

/// Handle to a node of a Graph.
class Var {
 public:
  Var() = default;
  Var(Graph* graph, int id) : graph_(graph), id_(id) {}

  bool valid() const { return graph_ != nullptr && id_ >= 0; }
  Graph& graph() const { return *graph_; }
  int id() const { return id_; }
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const;

 private:
  Graph* graph_ = nullptr;
  int id_ = -1;
};

/// Computation trace for reverse-mode differentiation.
///
/// Nodes are appended in evaluation order, so insertion order is a valid
/// topological order and the backward sweep simply walks it in reverse.
/// Leaves created by parameter() are bound by name to the attached
/// ParameterSet; backward() reports gradients under those names.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, const Tensor& out, const Tensor& grad_out)>;

  Graph() = default;
  explicit Graph(const ParameterSet* params) : params_(params) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  Var parameter(const std::string& name);
  /// Stops gradient flow: a constant copy of v's value.
  Var detach(Var v) { return constant(v.value()); }

  Var record(Tensor value, std::vector<int> inputs, BackwardFn backward);

  const Tensor& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  bool requires_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].requires_grad; }
  /// Gradient accumulator of a node, zero-initialized on first access.
  Tensor& grad(int id);

  /// Reverse sweep from a scalar loss. Every tensor of the attached
  /// ParameterSet appears in the result; unreached ones are zero.
  GradientMap backward(Var loss);

  /// Mixes a discrete branch decision (ReLU sign pattern, mask, clamp) into
  /// the graph's activation signature.
  void note_branches(std::uint64_t pattern_hash);
  std::uint64_t branch_signature() const { return signature_; }

  std::size_t node_count() const { return nodes_.size(); }
  const ParameterSet* parameters() const { return params_; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    std::vector<int> inputs;
    BackwardFn backward;
  };

  const ParameterSet* params_ = nullptr;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, int> bound_;
  std::uint64_t signature_ = 0xcbf29ce484222325ULL;
};

/// FNV-1a style accumulator for branch patterns.
class BranchHash {
 public:
  void add(bool bit) {
    h_ ^= bit ? 0x9eU : 0x3bU;
    h_ *= 0x100000001b3ULL;
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace laren
