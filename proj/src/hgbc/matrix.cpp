#include "greentune/hgbc/matrix.hpp"

namespace greentune::hgbc {

FeatureMatrix FeatureMatrix::select(std::span<const std::size_t> rows,
                                    std::span<const std::size_t> cols) const {
  FeatureMatrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= rows_) throw ContractError("row index out of range");
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j] >= cols_) throw ContractError("column index out of range");
      out(i, j) = (*this)(rows[i], cols[j]);
    }
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= rows_) throw ContractError("row index out of range");
    const auto src = row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace greentune::hgbc
