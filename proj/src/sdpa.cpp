#include "fomas/sdpa.hpp"

#include <cstdio>
#include <sstream>

namespace fomas {
namespace lmi {

namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void WriteEntries(std::ostream& os, int matno, int blkno, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) {
        os << matno << ' ' << blkno << ' ' << (i + 1) << ' ' << (j + 1) << ' '
           << Num(m(i, j)) << '\n';
      }
    }
  }
}

}  // namespace

void WriteSdpa(const Problem& p, std::ostream& os) {
  const ReducedProblem rp = Reduce(p);
  const int nz = static_cast<int>(rp.Z.cols());
  const int m = nz + 1;
  os << "\"fomas max-t feasibility problem: " << rp.blocks.size()
     << " blocks, " << m << " variables (last one is t)\"\n";
  os << m << " = mDIM\n";
  os << rp.blocks.size() << " = nBLOCK\n";
  for (size_t j = 0; j < rp.blocks.size(); ++j) {
    os << (j ? " " : "") << rp.blocks[j][0].rows();
  }
  os << " = bLOCKsTRUCT\n";
  for (int i = 0; i < m; ++i) os << (i ? " " : "") << (i == nz ? "-1" : "0");
  os << '\n';
  for (size_t j = 0; j < rp.blocks.size(); ++j) {
    const auto& b = rp.blocks[j];
    const int blk = static_cast<int>(j) + 1;
    WriteEntries(os, 0, blk, b[0]);
    for (int i = 0; i < nz; ++i) WriteEntries(os, i + 1, blk, -b[i + 1]);
    const Eigen::Index d = b[0].rows();
    WriteEntries(os, m, blk, -Matrix::Identity(d, d));
  }
}

std::string ToSdpa(const Problem& p) {
  std::ostringstream os;
  WriteSdpa(p, os);
  return os.str();
}

}  // namespace lmi
}  // namespace fomas
