#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "sl2limits/tree.hpp"

namespace sl2limits {

/// Disjoint-set forest with union by rank and path compression.
class UnionFind {
public:
    explicit UnionFind(size_t n = 0) : parent_(n), rank_(n, 0) {
        for (size_t i = 0; i < n; ++i) parent_[i] = i;
    }
    size_t add() {
        parent_.push_back(parent_.size());
        rank_.push_back(0);
        return parent_.size() - 1;
    }
    size_t find(size_t i) {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }
    bool unite(size_t i, size_t j) {
        i = find(i);
        j = find(j);
        if (i == j) return false;
        if (rank_[i] < rank_[j]) std::swap(i, j);
        parent_[j] = i;
        if (rank_[i] == rank_[j]) ++rank_[i];
        return true;
    }
    size_t size() const { return parent_.size(); }
    size_t count_roots() {
        size_t c = 0;
        for (size_t i = 0; i < parent_.size(); ++i)
            if (find(i) == i) ++c;
        return c;
    }

private:
    std::vector<size_t> parent_;
    std::vector<size_t> rank_;
};

struct OrbitExperimentResult {
    size_t class_count = 0;
    std::vector<size_t> class_count_per_round;
    size_t merges = 0;            // unions between previously distinct classes
    std::vector<std::pair<std::string, std::string>> merge_events;
    size_t skipped = 0;           // images lost to precision
    size_t total_ends = 0;
};

/**
 * Union-find closure of boundary points under a generator set.  Images of
 * collected ends under every generator and inverse are matched against the
 * collection (digit-window keys); unseen images are admitted up to `cap`
 * and joined to their parent's class.  The surviving class count can only
 * over-count the true orbit count.
 */
/// Optional pairwise merge oracle: a verified group element carrying the
/// first end to the second, or empty.  Tried on class representatives after
/// each closure round.
using MergeOracle = std::function<std::optional<Mat2>(const End&, const End&)>;

OrbitExperimentResult orbit_experiment(const std::vector<Mat2>& generators,
                                       const std::vector<End>& seeds, int rounds,
                                       size_t cap, const MergeOracle& oracle = nullptr);

}  // namespace sl2limits
