#include "awa/data.hpp"

namespace awa {

Eigen::MatrixXd corpus_matrix(const TraceCorpus& corpus) {
    if (corpus.traces.empty()) throw EmptyInput("corpus_matrix: empty corpus");
    const int L = corpus.traces.front().length();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(corpus.traces.size()), L);
    for (size_t i = 0; i < corpus.traces.size(); ++i) {
        if (corpus.traces[i].length() != L)
            throw InvalidTrace("corpus_matrix: trace length mismatch");
        for (int j = 0; j < L; ++j)
            m(static_cast<Eigen::Index>(i), j) = corpus.traces[i].values[static_cast<size_t>(j)];
    }
    return m;
}

Tensor rows_to_tensor(const Eigen::MatrixXd& rows) {
    return Tensor(rows, Shape{1, static_cast<int>(rows.cols())});
}

Tensor rows_to_tensor(const Eigen::MatrixXd& rows, const std::vector<int>& indices) {
    Eigen::MatrixXd sel(static_cast<Eigen::Index>(indices.size()), rows.cols());
    for (size_t i = 0; i < indices.size(); ++i)
        sel.row(static_cast<Eigen::Index>(i)) = rows.row(indices[i]);
    return rows_to_tensor(sel);
}

} // namespace awa
