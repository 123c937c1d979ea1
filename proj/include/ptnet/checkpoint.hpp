#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "ptnet/tape.hpp"

namespace ptnet::ad {

/// Owns all trainable parameters of a model, in creation order. Creation
/// order is the canonical order for checkpoints and optimizer state.
class ParameterStore {
 public:
  Parameter& create(const std::string& name, int rows, int cols = 1);
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;
  int total_size() const;
  void zero_grads();

  /// Text checkpoint: one header line, then per parameter a line
  /// "param <name> <rows> <cols>" followed by one line of hex-float values.
  /// Hex floats make save/load bit-exact.
  void save(const std::string& path) const;
  /// Loads into existing parameters; names and shapes must match exactly.
  void load(const std::string& path);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, int> by_name_;
};

}  // namespace ptnet::ad
