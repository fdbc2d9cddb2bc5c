#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sfpl {

/// Fold index of every observation: a seeded shuffle of 0..n-1 cut into
/// `folds` contiguous blocks whose sizes differ by at most one.
std::vector<int> fold_assignment(std::size_t n, int folds, std::uint64_t seed);

struct FoldScore {
    /// One squared prediction error per held-out observation, in held_out order.
    std::vector<double> squared_errors;
    /// Held-out points predicted through the no-neighbour fallback.
    std::size_t fallbacks = 0;
};

using FoldScorer = std::function<FoldScore(std::size_t candidate, std::span<const std::size_t> train,
                                           std::span<const std::size_t> held_out)>;

struct CVResult {
    /// Mean held-out squared error over all n observations, per candidate.
    std::vector<double> scores;
    std::size_t best = 0;
    /// Candidates whose score equals the best one (including best itself).
    std::vector<std::size_t> ties;
    std::vector<std::size_t> fallbacks;
};

/// K-fold cross-validation over `candidates` scorers. The lowest score wins;
/// ties go to the earliest candidate. Candidates are scored in parallel.
CVResult cross_validate(std::size_t candidates, std::size_t n, const FoldScorer& scorer, int folds,
                        std::uint64_t seed, unsigned threads = 1);

}  // namespace sfpl
