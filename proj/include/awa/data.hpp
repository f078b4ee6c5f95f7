#pragma once

#include "awa/tensor.hpp"
#include "awa/trace.hpp"

namespace awa {

/// Stacks corpus traces into a matrix, one trace per row.
Eigen::MatrixXd corpus_matrix(const TraceCorpus& corpus);

/// Wraps trace rows as a single-channel network input batch.
Tensor rows_to_tensor(const Eigen::MatrixXd& rows);

/// Selects a subset of rows as a network input batch.
Tensor rows_to_tensor(const Eigen::MatrixXd& rows, const std::vector<int>& indices);

} // namespace awa
