// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace nids {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// Record-major storage: one contiguous row per flow record.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using ClassId = std::int32_t;

}  // namespace nids
