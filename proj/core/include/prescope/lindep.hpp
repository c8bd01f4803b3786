#pragma once
#include <prescope/poly_univ.hpp>

#include <optional>
#include <vector>

namespace prescope {

// Incremental echelon over Q(n): feed vectors one at a time; add() reports
// the first linear dependence as combination coefficients over the inputs
// (the newest vector always carries coefficient 1).
class DependenceFinder {
  public:
    // all vectors must share the same dimension
    std::optional<std::vector<RatN>> add(std::vector<RatN> v);
    int fed() const { return count_; }

  private:
    struct Row {
        std::vector<RatN> v;      // pivot entry normalized to 1
        std::vector<RatN> combo;  // expression in terms of the fed vectors
        size_t pivot;
    };
    std::vector<Row> rows_;
    int count_ = 0;
};

}  // namespace prescope
