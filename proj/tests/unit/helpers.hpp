#pragma once

#include <initializer_list>
#include <memory>
#include <utility>

#include "tadapt/types.hpp"

namespace test_helpers {

inline std::shared_ptr<const tadapt::ComponentPartition> scalar_layout() {
  auto p = std::make_shared<tadapt::ComponentPartition>();
  p->add("u", 1);
  return p;
}

inline std::shared_ptr<const tadapt::ComponentPartition> layout_of(
    std::initializer_list<std::pair<const char*, Eigen::Index>> parts) {
  auto p = std::make_shared<tadapt::ComponentPartition>();
  for (const auto& [name, size] : parts) p->add(name, size);
  return p;
}

inline tadapt::StateVector state_of(std::shared_ptr<const tadapt::ComponentPartition> layout,
                                    std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double x : values) v[i++] = x;
  return tadapt::make_state(std::move(layout), std::move(v));
}

}  // namespace test_helpers
