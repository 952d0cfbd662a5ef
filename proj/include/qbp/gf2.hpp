#pragma once

#include <cstdint>
#include <vector>

namespace qbp {

// Dense binary matrix with 64-bit packed rows.
class Gf2Matrix {
 public:
  Gf2Matrix() = default;
  Gf2Matrix(int rows, int cols)
      : rows_(rows), cols_(cols), words_per_row_((cols + 63) / 64),
        data_(static_cast<size_t>(rows) * words_per_row_, 0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool get(int r, int c) const {
    return (data_[static_cast<size_t>(r) * words_per_row_ + c / 64] >> (c % 64)) & 1u;
  }
  void set(int r, int c, bool v) {
    uint64_t& w = data_[static_cast<size_t>(r) * words_per_row_ + c / 64];
    if (v)
      w |= uint64_t(1) << (c % 64);
    else
      w &= ~(uint64_t(1) << (c % 64));
  }
  // row dst ^= row src
  void xor_rows(int dst, int src) {
    uint64_t* d = &data_[static_cast<size_t>(dst) * words_per_row_];
    const uint64_t* s = &data_[static_cast<size_t>(src) * words_per_row_];
    for (int w = 0; w < words_per_row_; ++w) d[w] ^= s[w];
  }
  bool row_is_zero(int r) const {
    const uint64_t* s = &data_[static_cast<size_t>(r) * words_per_row_];
    for (int w = 0; w < words_per_row_; ++w)
      if (s[w]) return false;
    return true;
  }
  bool operator==(const Gf2Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  int words_per_row_ = 0;
  std::vector<uint64_t> data_;
};

}  // namespace qbp
