#include "anchorrefine/diffnet/param_store.h"

#include <atomic>
#include <string>

#include "anchorrefine/core/errors.h"
#include "anchorrefine/core/hashing.h"

namespace anchorrefine::diffnet {

namespace {
std::atomic<uint64_t> next_store_id{1};
}  // namespace

std::string ShapeToString(const std::vector<int64_t>& shape) {
  std::string out;
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) out += 'x';
    out += std::to_string(shape[i]);
  }
  return out;
}

ParamStore::ParamStore() : id_(next_store_id.fetch_add(1)) {}

Tensor& ParamStore::Add(const std::string& name, std::vector<int64_t> shape) {
  AR_EXPECT(!name.empty(), "empty parameter name");
  AR_EXPECT(!entries_.contains(name), "duplicate parameter " + name);
  int64_t n = 1;
  for (int64_t d : shape) {
    AR_EXPECT(d >= 1, "non-positive dimension for " + name);
    n *= d;
  }
  Tensor t;
  t.shape = std::move(shape);
  t.value = Eigen::VectorXd::Zero(n);
  t.grad = Eigen::VectorXd::Zero(n);
  ++version_;
  return entries_.emplace(name, std::move(t)).first->second;
}

bool ParamStore::Contains(std::string_view name) const {
  return entries_.find(name) != entries_.end();
}

Tensor& ParamStore::At(std::string_view name) {
  auto it = entries_.find(name);
  AR_EXPECT(it != entries_.end(), "unknown parameter " + std::string(name));
  return it->second;
}

const Tensor& ParamStore::At(std::string_view name) const {
  auto it = entries_.find(name);
  AR_EXPECT(it != entries_.end(), "unknown parameter " + std::string(name));
  return it->second;
}

void ParamStore::Freeze(std::string_view prefix) {
  bool any = false;
  for (auto& [name, t] : entries_) {
    if (!HasPrefix(name, prefix)) continue;
    t.frozen = true;
    t.grad.setZero();
    any = true;
  }
  AR_EXPECT(any, "no parameter matches prefix '" + std::string(prefix) + "'");
}

void ParamStore::Unfreeze(std::string_view prefix) {
  bool any = false;
  for (auto& [name, t] : entries_) {
    if (!HasPrefix(name, prefix)) continue;
    t.frozen = false;
    any = true;
  }
  AR_EXPECT(any, "no parameter matches prefix '" + std::string(prefix) + "'");
}

void ParamStore::CloneParams(std::string_view src_prefix,
                             std::string_view dst_prefix) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& [name, t] : entries_) {
    if (HasPrefix(name, src_prefix)) {
      pairs.emplace_back(name, std::string(dst_prefix) +
                                   name.substr(src_prefix.size()));
    }
  }
  AR_EXPECT(!pairs.empty(),
            "no parameter matches prefix '" + std::string(src_prefix) + "'");
  for (const auto& [src, dst] : pairs) {
    const Tensor& from = entries_.at(src);
    if (!Contains(dst)) Add(dst, from.shape);
    Tensor& to = At(dst);
    AR_EXPECT(to.shape == from.shape, "shape mismatch cloning " + src +
                                          " -> " + dst);
    to.value = entries_.at(src).value;
  }
  ++version_;
}

void ParamStore::Erase(std::string_view prefix) {
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (HasPrefix(it->first, prefix)) {
      it = entries_.erase(it);
    } else {
      ++it;
    }
  }
  ++version_;
}

void ParamStore::ZeroGrad() {
  for (auto& [name, t] : entries_) t.grad.setZero();
}

std::vector<std::string> ParamStore::Names(std::string_view prefix) const {
  std::vector<std::string> out;
  for (const auto& [name, t] : entries_) {
    if (HasPrefix(name, prefix)) out.push_back(name);
  }
  return out;
}

int64_t ParamStore::ParameterCount(std::string_view prefix) const {
  int64_t n = 0;
  for (const auto& [name, t] : entries_) {
    if (HasPrefix(name, prefix)) n += t.size();
  }
  return n;
}

uint64_t ParamStore::Fingerprint(std::string_view prefix) const {
  uint64_t h = kFnvOffset;
  for (const auto& [name, t] : entries_) {
    if (!HasPrefix(name, prefix)) continue;
    h = Fnv1a64(name, h);
    h = Fnv1a64(std::span<const double>(t.value.data(), t.value.size()), h);
  }
  return h;
}

void ParamStore::CopyValuesFrom(const ParamStore& other,
                                std::string_view prefix) {
  for (const auto& [name, t] : other) {
    if (!HasPrefix(name, prefix)) continue;
    Tensor& dst = At(name);
    AR_EXPECT(dst.shape == t.shape, "shape mismatch copying " + name);
    dst.value = t.value;
  }
  ++version_;
}

}  // namespace anchorrefine::diffnet
