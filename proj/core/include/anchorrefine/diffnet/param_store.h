#ifndef ANCHORREFINE_DIFFNET_PARAM_STORE_H_
#define ANCHORREFINE_DIFFNET_PARAM_STORE_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace anchorrefine::diffnet {

// A named trainable tensor. Values are stored flat; a 2-D weight of shape
// {rows, cols} is laid out column-major so it maps directly onto an
// Eigen::Map<MatrixXd>(rows, cols).
struct Tensor {
  std::vector<int64_t> shape;
  Eigen::VectorXd value;
  Eigen::VectorXd grad;
  bool frozen = false;

  int64_t size() const { return value.size(); }
};

std::string ShapeToString(const std::vector<int64_t>& shape);

// Ordered (lexicographic) map from parameter path to tensor.
//
// Every mutation of values through Touch()/optimizer steps bumps version(),
// which lets a forward record detect that it has gone stale.
class ParamStore {
 public:
  using Map = std::map<std::string, Tensor, std::less<>>;

  ParamStore();

  // Adds a zero-valued tensor. Names must be unique.
  Tensor& Add(const std::string& name, std::vector<int64_t> shape);

  bool Contains(std::string_view name) const;
  Tensor& At(std::string_view name);
  const Tensor& At(std::string_view name) const;

  // Marks every entry under `prefix` frozen. Frozen entries never accumulate
  // gradient and are skipped by the optimizer. Throws if nothing matches.
  void Freeze(std::string_view prefix);
  void Unfreeze(std::string_view prefix);

  // Copies values of every entry under `src_prefix` to the same suffix under
  // `dst_prefix`, creating destination entries if needed. Existing
  // destinations must have identical shapes.
  void CloneParams(std::string_view src_prefix, std::string_view dst_prefix);

  // Removes every entry under prefix (no error when nothing matches).
  void Erase(std::string_view prefix);

  void ZeroGrad();

  // Names under prefix, in iteration order.
  std::vector<std::string> Names(std::string_view prefix = "") const;
  int64_t ParameterCount(std::string_view prefix = "") const;

  // Hash of the raw bytes of every value under prefix (names included).
  uint64_t Fingerprint(std::string_view prefix = "") const;

  // Copies values (and nothing else) under prefix from `other`; shapes must
  // match.
  void CopyValuesFrom(const ParamStore& other, std::string_view prefix);

  uint64_t id() const { return id_; }
  uint64_t version() const { return version_; }
  void Touch() { ++version_; }

  Map::iterator begin() { return entries_.begin(); }
  Map::iterator end() { return entries_.end(); }
  Map::const_iterator begin() const { return entries_.begin(); }
  Map::const_iterator end() const { return entries_.end(); }
  size_t size() const { return entries_.size(); }

 private:
  Map entries_;
  uint64_t id_;
  uint64_t version_ = 0;
};

inline bool HasPrefix(std::string_view name, std::string_view prefix) {
  return name.substr(0, prefix.size()) == prefix;
}

}  // namespace anchorrefine::diffnet

#endif  // ANCHORREFINE_DIFFNET_PARAM_STORE_H_
