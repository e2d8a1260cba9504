#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tadapt {

using Vector = Eigen::VectorXd;
using ConstVectorRef = Eigen::Ref<const Eigen::VectorXd>;

/// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class UnsupportedOrderError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

class HistoryUnderflowError : public Error {
 public:
  using Error::Error;
};

class LayoutError : public Error {
 public:
  using Error::Error;
};

class LinearSolverError : public Error {
 public:
  using Error::Error;
};

class NotConvergedError : public Error {
 public:
  using Error::Error;
};

/// Norm applied to one component slice of a state vector. When empty,
/// the plain Euclidean norm is used.
using ComponentNorm = std::function<double(ConstVectorRef)>;

/// Ordered, contiguous split of a flat state vector into named physical
/// fields (e.g. velocity then pressure). Offsets are assigned in insertion
/// order, so the partition doubles as the memory layout of the state.
class ComponentPartition {
 public:
  struct Component {
    std::string name;
    Eigen::Index offset = 0;
    Eigen::Index size = 0;
    ComponentNorm norm;  // empty -> Euclidean
  };

  /// Appends a component after the existing ones. Names must be unique and
  /// sizes positive.
  void add(std::string name, Eigen::Index size, ComponentNorm norm = {});

  [[nodiscard]] Eigen::Index size() const { return total_; }
  [[nodiscard]] Eigen::Index component_count() const {
    return static_cast<Eigen::Index>(components_.size());
  }
  [[nodiscard]] const Component& component(Eigen::Index i) const;
  [[nodiscard]] const Component* find(std::string_view name) const;

  /// L2-type norm of a slice that must have the component's length.
  [[nodiscard]] double norm(std::string_view name, ConstVectorRef slice) const;
  [[nodiscard]] double norm(const Component& c, ConstVectorRef slice) const;

  /// View of one component inside a full-length vector.
  [[nodiscard]] Eigen::VectorBlock<const Vector> slice(const Vector& full,
                                                       const Component& c) const;
  [[nodiscard]] Eigen::VectorBlock<const Vector> slice(const Vector& full,
                                                       std::string_view name) const;

  [[nodiscard]] const std::vector<Component>& components() const { return components_; }

 private:
  std::vector<Component> components_;
  Eigen::Index total_ = 0;
};

/// Flat coefficient vector plus the shared partition describing it.
struct StateVector {
  Vector values;
  std::shared_ptr<const ComponentPartition> layout;

  [[nodiscard]] Eigen::Index size() const { return values.size(); }
};

[[nodiscard]] StateVector make_state(std::shared_ptr<const ComponentPartition> layout,
                                     Vector values);
[[nodiscard]] StateVector zero_state(std::shared_ptr<const ComponentPartition> layout);

[[nodiscard]] bool same_layout(const StateVector& a, const StateVector& b);

/// Throws LayoutError unless both states share a layout of equal total size.
void require_same_layout(const StateVector& a, const StateVector& b,
                         std::string_view where);

// ---------------------------------------------------------------------------
// inline definitions

inline void ComponentPartition::add(std::string name, Eigen::Index size,
                                    ComponentNorm norm) {
  if (size <= 0) {
    throw InvalidInputError("component '" + name + "' must have positive size");
  }
  if (find(name) != nullptr) {
    throw InvalidInputError("duplicate component name '" + name + "'");
  }
  components_.push_back(Component{std::move(name), total_, size, std::move(norm)});
  total_ += size;
}

inline const ComponentPartition::Component& ComponentPartition::component(
    Eigen::Index i) const {
  if (i < 0 || i >= component_count()) {
    throw InvalidInputError("component index out of range");
  }
  return components_[static_cast<std::size_t>(i)];
}

inline const ComponentPartition::Component* ComponentPartition::find(
    std::string_view name) const {
  for (const auto& c : components_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

inline double ComponentPartition::norm(const Component& c, ConstVectorRef slice) const {
  if (slice.size() != c.size) {
    throw LayoutError("norm: slice length " + std::to_string(slice.size()) +
                      " does not match component '" + c.name + "' of size " +
                      std::to_string(c.size));
  }
  if (c.norm) return c.norm(slice);
  return slice.norm();
}

inline double ComponentPartition::norm(std::string_view name, ConstVectorRef slice) const {
  const Component* c = find(name);
  if (c == nullptr) {
    throw InvalidInputError("unknown component '" + std::string(name) + "'");
  }
  return norm(*c, slice);
}

inline Eigen::VectorBlock<const Vector> ComponentPartition::slice(
    const Vector& full, const Component& c) const {
  if (full.size() != total_) {
    throw LayoutError("slice: vector length does not match partition");
  }
  return full.segment(c.offset, c.size);
}

inline Eigen::VectorBlock<const Vector> ComponentPartition::slice(
    const Vector& full, std::string_view name) const {
  const Component* c = find(name);
  if (c == nullptr) {
    throw InvalidInputError("unknown component '" + std::string(name) + "'");
  }
  return slice(full, *c);
}

inline StateVector make_state(std::shared_ptr<const ComponentPartition> layout,
                              Vector values) {
  if (!layout) throw InvalidInputError("make_state: null layout");
  if (values.size() != layout->size()) {
    throw LayoutError("make_state: values length " + std::to_string(values.size()) +
                      " does not match partition size " + std::to_string(layout->size()));
  }
  return StateVector{std::move(values), std::move(layout)};
}

inline StateVector zero_state(std::shared_ptr<const ComponentPartition> layout) {
  if (!layout) throw InvalidInputError("zero_state: null layout");
  Vector v = Vector::Zero(layout->size());
  return StateVector{std::move(v), std::move(layout)};
}

inline bool same_layout(const StateVector& a, const StateVector& b) {
  if (a.layout == b.layout) return a.values.size() == b.values.size();
  if (!a.layout || !b.layout) return false;
  if (a.layout->size() != b.layout->size()) return false;
  if (a.layout->component_count() != b.layout->component_count()) return false;
  for (Eigen::Index i = 0; i < a.layout->component_count(); ++i) {
    const auto& ca = a.layout->component(i);
    const auto& cb = b.layout->component(i);
    if (ca.name != cb.name || ca.offset != cb.offset || ca.size != cb.size) return false;
  }
  return true;
}

inline void require_same_layout(const StateVector& a, const StateVector& b,
                                std::string_view where) {
  if (!same_layout(a, b)) {
    throw LayoutError(std::string(where) + ": states use different layouts");
  }
}

}  // namespace tadapt
