#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

namespace sparse_recover {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Dimensions and signal class parameters of one recovery task.
// n rows split into a pilot part of size n1 and a selection part of
// size n2 = n - n1.
struct ProblemInstance {
  Index n = 0;
  Index p = 0;
  Index s = 0;
  double a = 0.0;
  double sigma = 0.0;
  Index n1 = 0;
  Index n2 = 0;
};

// Validates every field and fills n2 = n - n1. Throws
// std::invalid_argument listing all violated bounds at once.
ProblemInstance make_problem(Index n, Index p, Index s, double a,
                             double sigma, Index n1);

// True when beta has at most s nonzero entries and each nonzero has
// magnitude at least a.
bool membership_omega(const Vector& beta, Index s, double a);

// Binary inclusion vector over the p coordinates.
class SupportMask {
 public:
  SupportMask() = default;
  explicit SupportMask(Index p) : bits_(static_cast<std::size_t>(p), 0) {}
  static SupportMask from_bits(std::vector<std::uint8_t> bits);

  Index size() const { return static_cast<Index>(bits_.size()); }
  bool test(Index i) const { return bits_[static_cast<std::size_t>(i)] != 0; }
  void set(Index i, bool on) { bits_[static_cast<std::size_t>(i)] = on ? 1 : 0; }
  Index count() const;
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  bool operator==(const SupportMask&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Exact-zero support of beta, no tolerance.
SupportMask support_of(const Vector& beta);

// Number of disagreeing coordinates. Throws on length mismatch.
Index hamming_distance(const SupportMask& lhs, const SupportMask& rhs);

// Design matrix (n rows, p columns) with its response vector.
struct Dataset {
  Matrix X;
  Vector Y;

  Index rows() const { return X.rows(); }
  Index cols() const { return X.cols(); }
};

// Disjoint row index sets defining the pilot/selection split.
struct SplitScheme {
  std::vector<Index> first;
  std::vector<Index> second;

  // Deterministic default: rows [0, n1) and [n1, n).
  static SplitScheme head(Index n, Index n1);
  // Throws unless both parts are nonempty, disjoint and within [0, n).
  void validate(Index n) const;
};

// Row subset of a dataset. Holds indices only; data stays with the
// parent and is materialized on demand.
class DatasetView {
 public:
  DatasetView(const Dataset& parent, std::vector<Index> rows)
      : parent_(&parent), rows_(std::move(rows)) {}

  Index rows() const { return static_cast<Index>(rows_.size()); }
  Index cols() const { return parent_->cols(); }
  const std::vector<Index>& row_indices() const { return rows_; }

  auto X() const { return parent_->X(rows_, Eigen::all); }
  auto Y() const { return parent_->Y(rows_); }

  Matrix materialize_X() const { return parent_->X(rows_, Eigen::all); }
  Vector materialize_Y() const { return parent_->Y(rows_); }

 private:
  const Dataset* parent_;
  std::vector<Index> rows_;
};

// Splits a dataset into the two subsamples described by the scheme.
std::pair<DatasetView, DatasetView> split_sample(const Dataset& data,
                                                 const SplitScheme& scheme);

}  // namespace sparse_recover
