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

#include "laren/autodiff.hpp"

#include <sstream>

namespace laren {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kWrongLayerShape: return "WrongLayerShape";
    case ErrorCode::kNonScalarLoss: return "NonScalarLoss";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kDegenerateAttributes: return "DegenerateAttributes";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kBadConfig: return "BadConfig";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kMissingFile: return "MissingFile";
  }
  return "Error";
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

const Tensor& ParameterSet::at(const std::string& name) const {
  auto it = tensors_.find(name);
  require(it != tensors_.end(), ErrorCode::kMissingFile, "no parameter named '" + name + "'");
  return it->second;
}

Tensor& ParameterSet::at(const std::string& name) {
  auto it = tensors_.find(name);
  require(it != tensors_.end(), ErrorCode::kMissingFile, "no parameter named '" + name + "'");
  return it->second;
}

void ParameterSet::merge(const ParameterSet& other, const std::string& prefix) {
  for (const auto& [name, value] : other) {
    if (name.rfind(prefix, 0) == 0) tensors_[name] = value;
  }
}

Eigen::Index ParameterSet::element_count() const {
  Eigen::Index n = 0;
  for (const auto& [name, value] : tensors_) n += value.size();
  return n;
}

const Tensor& Var::value() const { return graph_->value(id_); }
bool Var::requires_grad() const { return graph_->requires_grad(id_); }

Var Graph::constant(Tensor value) { return record(std::move(value), {}, nullptr); }

Var Graph::parameter(const std::string& name) {
  if (auto it = bound_.find(name); it != bound_.end()) return Var(this, it->second);
  require(params_ != nullptr, ErrorCode::kMissingFile, "graph has no parameter set for '" + name + "'");
  Node node;
  node.value = params_->at(name);
  node.requires_grad = true;
  nodes_.push_back(std::move(node));
  const int id = static_cast<int>(nodes_.size()) - 1;
  bound_.emplace(name, id);
  return Var(this, id);
}

Var Graph::record(Tensor value, std::vector<int> inputs, BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  for (int in : inputs) node.requires_grad = node.requires_grad || requires_grad(in);
  if (node.requires_grad) {
    node.inputs = std::move(inputs);
    node.backward = std::move(backward);
  }
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Tensor& Graph::grad(int id) {
  Node& node = nodes_[static_cast<std::size_t>(id)];
  if (node.grad.empty()) node.grad = Tensor::zeros(node.value.shape());
  return node.grad;
}

GradientMap Graph::backward(Var loss) {
  require(loss.valid() && &loss.graph() == this, ErrorCode::kNonScalarLoss, "loss is not a node of this graph");
  require(loss.value().is_scalar(), ErrorCode::kNonScalarLoss,
          "loss has shape " + shape_string(loss.value().shape()));
  grad(loss.id()).values().setOnes();
  for (int id = loss.id(); id >= 0; --id) {
    Node& node = nodes_[static_cast<std::size_t>(id)];
    if (!node.requires_grad || !node.backward || node.grad.empty()) continue;
    node.backward(*this, node.value, node.grad);
  }
  GradientMap grads;
  if (params_ == nullptr) return grads;
  for (const auto& [name, value] : *params_) {
    auto it = bound_.find(name);
    if (it != bound_.end() && !nodes_[static_cast<std::size_t>(it->second)].grad.empty()) {
      grads.emplace(name, nodes_[static_cast<std::size_t>(it->second)].grad);
    } else {
      grads.emplace(name, Tensor::zeros(value.shape()));
    }
  }
  return grads;
}

void Graph::note_branches(std::uint64_t pattern_hash) {
  signature_ ^= pattern_hash + 0x9e3779b97f4a7c15ULL + (signature_ << 6U) + (signature_ >> 2U);
}

}  // namespace laren
