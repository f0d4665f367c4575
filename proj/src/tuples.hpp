#pragma once

// All index tuples of a fixed length over [0, size). Internal to the library
// sources; the empty tuple is produced exactly once when n is 0.

#include <cstddef>
#include <vector>

namespace plt::tupledetail {

struct TupleIter {
  size_t n, size;
  std::vector<size_t> idx;
  bool done;
  TupleIter(size_t n_, size_t size_) : n(n_), size(size_), idx(n_, 0), done(size_ == 0 && n_ > 0) {}
  bool next() {
    for (size_t i = n; i-- > 0;) {
      if (++idx[i] < size) return true;
      idx[i] = 0;
    }
    return false;
  }
};

}  // namespace plt::tupledetail
