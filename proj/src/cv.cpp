#include "sfpl/cv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "sfpl/error.hpp"
#include "sfpl/parallel.hpp"

namespace sfpl {

std::vector<int> fold_assignment(std::size_t n, int folds, std::uint64_t seed) {
    if (folds < 2) throw ParameterError("cross-validation needs at least 2 folds");
    if (static_cast<std::size_t>(folds) > n) {
        throw ParameterError(std::to_string(folds) + " folds requested for " + std::to_string(n) +
                             " observations");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<int> fold(n);
    const std::size_t f = static_cast<std::size_t>(folds);
    for (std::size_t pos = 0; pos < n; ++pos) {
        // Block b covers positions [b*n/f, (b+1)*n/f).
        fold[order[pos]] = static_cast<int>((pos * f) / n);
    }
    return fold;
}

CVResult cross_validate(std::size_t candidates, std::size_t n, const FoldScorer& scorer, int folds,
                        std::uint64_t seed, unsigned threads) {
    if (candidates == 0) throw ConfigError("cross-validation needs at least one candidate");
    const std::vector<int> fold = fold_assignment(n, folds, seed);

    std::vector<std::vector<std::size_t>> train(static_cast<std::size_t>(folds));
    std::vector<std::vector<std::size_t>> held(static_cast<std::size_t>(folds));
    for (std::size_t i = 0; i < n; ++i) {
        for (int f = 0; f < folds; ++f) {
            (fold[i] == f ? held : train)[static_cast<std::size_t>(f)].push_back(i);
        }
    }

    CVResult result;
    result.scores.assign(candidates, 0.0);
    result.fallbacks.assign(candidates, 0);
    parallel_for(candidates, threads, [&](std::size_t c) {
        double total = 0.0;
        std::size_t fb = 0;
        for (std::size_t f = 0; f < held.size(); ++f) {
            const FoldScore s = scorer(c, train[f], held[f]);
            if (s.squared_errors.size() != held[f].size()) {
                throw DimensionError("fold scorer returned the wrong number of errors");
            }
            for (double e : s.squared_errors) total += e;
            fb += s.fallbacks;
        }
        result.scores[c] = total / static_cast<double>(n);
        result.fallbacks[c] = fb;
    });

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < candidates; ++c) {
        if (result.scores[c] < best) {
            best = result.scores[c];
            result.best = c;
        }
    }
    for (std::size_t c = 0; c < candidates; ++c) {
        if (result.scores[c] == best) result.ties.push_back(c);
    }
    return result;
}

}  // namespace sfpl
