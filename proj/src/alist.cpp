#include "qbp/alist.hpp"

#include <fstream>
#include <sstream>

namespace qbp {

namespace {

int next_int(std::istream& in, const char* what) {
  int v;
  if (!(in >> v)) throw std::runtime_error(std::string("alist: truncated or malformed ") + what);
  return v;
}

}  // namespace

ParityCheckMatrix read_alist(std::istream& in) {
  const int n = next_int(in, "block length");
  const int m = next_int(in, "check count");
  if (n <= 0 || m <= 0) throw std::runtime_error("alist: non-positive dimensions");
  const int max_col = next_int(in, "max column degree");
  const int max_row = next_int(in, "max row degree");

  std::vector<int> col_deg(n), row_deg(m);
  for (int j = 0; j < n; ++j) {
    col_deg[j] = next_int(in, "column degree");
    if (col_deg[j] < 0 || col_deg[j] > max_col)
      throw std::runtime_error("alist: column degree out of declared range");
  }
  for (int i = 0; i < m; ++i) {
    row_deg[i] = next_int(in, "row degree");
    if (row_deg[i] < 0 || row_deg[i] > max_row)
      throw std::runtime_error("alist: row degree out of declared range");
  }

  std::vector<std::pair<int, int>> entries;
  for (int j = 0; j < n; ++j) {
    for (int e = 0; e < max_col; ++e) {
      int v = next_int(in, "column index list");
      if (e < col_deg[j]) {
        if (v < 1 || v > m) throw std::runtime_error("alist: check index out of range");
        entries.emplace_back(v - 1, j);
      } else if (v != 0) {
        throw std::runtime_error("alist: expected zero padding in column list");
      }
    }
  }
  // row lists: validated against the column-derived entry set
  ParityCheckMatrix H = ParityCheckMatrix::from_entries(m, n, entries);
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(H.row_bits[i].size()) != row_deg[i])
      throw std::runtime_error("alist: row degree inconsistent with column lists");
    for (int e = 0; e < max_row; ++e) {
      int v = next_int(in, "row index list");
      if (e < row_deg[i]) {
        if (v < 1 || v > n || !H.has_entry(i, v - 1))
          throw std::runtime_error("alist: row list inconsistent with column lists");
      } else if (v != 0) {
        throw std::runtime_error("alist: expected zero padding in row list");
      }
    }
  }
  return H;
}

ParityCheckMatrix load_alist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open alist file: " + path);
  return read_alist(in);
}

void write_alist(const ParityCheckMatrix& H, std::ostream& out) {
  int max_col = 0, max_row = 0;
  for (const auto& c : H.col_checks) max_col = std::max<int>(max_col, c.size());
  for (const auto& r : H.row_bits) max_row = std::max<int>(max_row, r.size());
  out << H.cols << ' ' << H.rows << '\n' << max_col << ' ' << max_row << '\n';
  for (int j = 0; j < H.cols; ++j) out << H.col_checks[j].size() << (j + 1 < H.cols ? ' ' : '\n');
  for (int i = 0; i < H.rows; ++i) out << H.row_bits[i].size() << (i + 1 < H.rows ? ' ' : '\n');
  for (const auto& c : H.col_checks) {
    for (int e = 0; e < max_col; ++e)
      out << (e < static_cast<int>(c.size()) ? c[e] + 1 : 0) << (e + 1 < max_col ? ' ' : '\n');
    if (max_col == 0) out << '\n';
  }
  for (const auto& r : H.row_bits) {
    for (int e = 0; e < max_row; ++e)
      out << (e < static_cast<int>(r.size()) ? r[e] + 1 : 0) << (e + 1 < max_row ? ' ' : '\n');
    if (max_row == 0) out << '\n';
  }
}

void save_alist(const ParityCheckMatrix& H, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write alist file: " + path);
  write_alist(H, out);
}

}  // namespace qbp
