#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace seggrasp {

template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;

/// Face-vs-prompt relevance scores, one row per face and one column per prompt.
template <typename Scalar>
using ScoreMatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowVectorT = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Vec3 = Vec3T<double>;
using ScoreMatrix = ScoreMatrixT<double>;
using VectorXd = VectorT<double>;
using RowVectorXd = RowVectorT<double>;

using VertexMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using FaceMatrix = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

inline constexpr int kUnknownLabel = -1;

}  // namespace seggrasp
