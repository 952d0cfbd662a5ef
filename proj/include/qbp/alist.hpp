#pragma once

#include <iosfwd>
#include <string>

#include "qbp/code.hpp"

namespace qbp {

// MacKay alist interchange format: "N M", max column/row degrees,
// per-column and per-row degree lists, then 1-based index lists.
ParityCheckMatrix load_alist(const std::string& path);
ParityCheckMatrix read_alist(std::istream& in);

void save_alist(const ParityCheckMatrix& H, const std::string& path);
void write_alist(const ParityCheckMatrix& H, std::ostream& out);

}  // namespace qbp
