#pragma once

// Search for the most nearly symmetric pair of fragment descriptors:
// exhaustive enumeration and a seeded genetic algorithm over index pairs.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "symchaos/descriptors.hpp"
#include "symchaos/error.hpp"

namespace symchaos {

struct SymmetryPair {
    std::size_t idx_a = 0;  // idx_a < idx_b
    std::size_t idx_b = 0;
    double distance = 0.0;

    friend bool operator==(const SymmetryPair&, const SymmetryPair&) = default;
};

/// Ascending distance, then (idx_a, idx_b).
inline bool pair_less(const SymmetryPair& x, const SymmetryPair& y) {
    if (x.distance != y.distance) return x.distance < y.distance;
    if (x.idx_a != y.idx_a) return x.idx_a < y.idx_a;
    return x.idx_b < y.idx_b;
}

struct GaConfig {
    std::size_t population = 64;
    std::size_t generations = 100;
    double crossover_rate = 0.8;
    double mutation_rate = 0.1;
    std::size_t elite = 2;
    std::size_t tournament_k = 3;
    std::uint64_t seed = 0;

    void validate() const {
        if (population < 4) throw Error("GA population must be >= 4");
        if (elite >= population) throw Error("GA elite count must be below the population size");
        if (tournament_k < 2) throw Error("GA tournament size must be >= 2");
        if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) throw Error("GA crossover rate must be in [0, 1]");
        if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw Error("GA mutation rate must be in [0, 1]");
    }
};

struct GaResult {
    std::vector<SymmetryPair> pairs;            // top_k distinct pairs ever evaluated
    std::vector<double> best_per_generation;    // best-ever distance after each generation (0 = initial)
    std::size_t evaluations = 0;                // distinct pairs evaluated
};

/// Every pair, keeping the top_k smallest. `distance(a, b)` is called with a < b.
template <typename DistanceFn>
std::vector<SymmetryPair> exhaustive_search_with(std::size_t count, DistanceFn&& distance, std::size_t top_k) {
    if (count < 2) throw Error("pair search needs at least 2 descriptors");
    std::vector<SymmetryPair> all;
    all.reserve(count * (count - 1) / 2);
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = a + 1; b < count; ++b) all.push_back({a, b, distance(a, b)});
    }
    const std::size_t keep = std::min(top_k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), pair_less);
    all.resize(keep);
    return all;
}

inline std::vector<SymmetryPair> exhaustive_search(std::span<const Descriptor> descriptors, const SpectralWeights& w,
                                                   std::size_t top_k) {
    return exhaustive_search_with(
        descriptors.size(), [&](std::size_t a, std::size_t b) { return symmetry_distance(descriptors[a], descriptors[b], w); },
        top_k);
}

namespace detail {

/// Independent stream for one (generation, slot) draw sequence.
inline std::mt19937_64 slot_stream(std::uint64_t seed, std::size_t generation, std::size_t slot) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(generation), static_cast<std::uint32_t>(slot), 0x5eedu};
    return std::mt19937_64(seq);
}

struct Chromosome {
    std::size_t a = 0, b = 0;
    friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

}  // namespace detail

/// Genetic search over index pairs (a, b) with fitness -distance.
///
/// Tournament selection, single-point crossover that takes one index from
/// each parent, mutation that redraws one index, and elitism. Children that
/// collide with their own index, with a chromosome already placed in the
/// next generation, or with an already evaluated pair while unvisited ones
/// remain are redrawn, so no slot is spent on a cached pair. Each
/// (generation, slot) owns its random stream, so the outcome depends only on
/// the seed. Distances are cached by pair.
template <typename DistanceFn>
GaResult ga_search_with(std::size_t count, DistanceFn&& distance, const GaConfig& cfg, std::size_t top_k) {
    if (count < 2) throw Error("pair search needs at least 2 descriptors");
    cfg.validate();
    using detail::Chromosome;
    const std::size_t space = count * (count - 1) / 2;
    const auto key = [count](const Chromosome& c) { return c.a * count + c.b; };

    std::unordered_map<std::size_t, double> cache;
    double best_ever = std::numeric_limits<double>::infinity();
    const auto fitness = [&](const Chromosome& c) {
        const auto [it, inserted] = cache.try_emplace(key(c), 0.0);
        if (inserted) {
            it->second = distance(c.a, c.b);
            best_ever = std::min(best_ever, it->second);
        }
        return it->second;
    };
    const auto random_pair = [count](std::mt19937_64& rng) {
        std::uniform_int_distribution<std::size_t> first(0, count - 1);
        std::uniform_int_distribution<std::size_t> second(0, count - 2);
        std::size_t a = first(rng);
        std::size_t b = second(rng);
        if (b >= a) ++b;
        return a < b ? Chromosome{a, b} : Chromosome{b, a};
    };
    const auto redraw_one = [count](Chromosome c, std::mt19937_64& rng) {
        std::uniform_int_distribution<int> which(0, 1);
        std::uniform_int_distribution<std::size_t> value(0, count - 2);
        const bool first = which(rng) == 0;
        const std::size_t keep = first ? c.b : c.a;
        std::size_t v = value(rng);
        if (v >= keep) ++v;
        return v < keep ? Chromosome{v, keep} : Chromosome{keep, v};
    };

    std::vector<Chromosome> pop;
    pop.reserve(cfg.population);
    if (cfg.population >= space) {
        for (std::size_t a = 0; a < count; ++a) {
            for (std::size_t b = a + 1; b < count; ++b) pop.push_back({a, b});
        }
        for (std::size_t s = pop.size(); s < cfg.population; ++s) {
            auto rng = detail::slot_stream(cfg.seed, 0, s);
            pop.push_back(random_pair(rng));
        }
    } else {
        std::unordered_set<std::size_t> seen;
        for (std::size_t s = 0; s < cfg.population; ++s) {
            auto rng = detail::slot_stream(cfg.seed, 0, s);
            Chromosome c = random_pair(rng);
            while (!seen.insert(key(c)).second) c = random_pair(rng);
            pop.push_back(c);
        }
    }
    std::vector<double> fit(pop.size());
    for (std::size_t s = 0; s < pop.size(); ++s) fit[s] = fitness(pop[s]);

    GaResult result;
    result.best_per_generation.push_back(best_ever);

    const auto better = [&](std::size_t x, std::size_t y) {
        if (fit[x] != fit[y]) return fit[x] < fit[y];
        return key(pop[x]) < key(pop[y]);
    };

    std::vector<std::size_t> order(pop.size());
    for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), better);

        std::vector<Chromosome> next;
        next.reserve(cfg.population);
        std::unordered_set<std::size_t> placed;
        for (std::size_t r = 0; r < order.size() && next.size() < cfg.elite; ++r) {
            const auto& c = pop[order[r]];
            if (placed.insert(key(c)).second) next.push_back(c);
        }

        for (std::size_t slot = next.size(); slot < cfg.population; ++slot) {
            auto rng = detail::slot_stream(cfg.seed, gen, slot);
            std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            const auto tournament = [&] {
                std::size_t winner = pick(rng);
                for (std::size_t t = 1; t < cfg.tournament_k; ++t) {
                    const std::size_t challenger = pick(rng);
                    if (better(challenger, winner)) winner = challenger;
                }
                return pop[winner];
            };
            const Chromosome p1 = tournament();
            const Chromosome p2 = tournament();

            Chromosome child = p1;
            if (unit(rng) < cfg.crossover_rate) {
                std::size_t a = p1.a, b = p2.b;
                if (unit(rng) < 0.5) {
                    a = p2.a;
                    b = p1.b;
                }
                if (a == b) {
                    child = redraw_one({a, b}, rng);
                } else {
                    child = a < b ? Chromosome{a, b} : Chromosome{b, a};
                }
            }
            if (unit(rng) < cfg.mutation_rate) child = redraw_one(child, rng);
            // Repair: a child that repeats a pair already placed in this
            // generation, or already evaluated while unvisited pairs remain,
            // is redrawn; first by replacing one index, then uniformly.
            const auto stale = [&](const Chromosome& c) {
                return placed.count(key(c)) > 0 || (cache.size() + placed.size() < space && cache.count(key(c)) > 0);
            };
            for (int attempt = 0; attempt < 64 && placed.size() < space && stale(child); ++attempt)
                child = attempt < 16 ? redraw_one(child, rng) : random_pair(rng);
            placed.insert(key(child));
            next.push_back(child);
        }

        pop = std::move(next);
        for (std::size_t s = 0; s < pop.size(); ++s) fit[s] = fitness(pop[s]);
        result.best_per_generation.push_back(best_ever);
    }

    result.evaluations = cache.size();
    result.pairs.reserve(cache.size());
    for (const auto& [k, d] : cache) result.pairs.push_back({k / count, k % count, d});
    const std::size_t keep = std::min(top_k, result.pairs.size());
    std::partial_sort(result.pairs.begin(), result.pairs.begin() + static_cast<std::ptrdiff_t>(keep),
                      result.pairs.end(), pair_less);
    result.pairs.resize(keep);
    return result;
}

inline GaResult ga_search_detailed(std::span<const Descriptor> descriptors, const SpectralWeights& w,
                                   const GaConfig& cfg, std::size_t top_k) {
    return ga_search_with(
        descriptors.size(), [&](std::size_t a, std::size_t b) { return symmetry_distance(descriptors[a], descriptors[b], w); },
        cfg, top_k);
}

inline std::vector<SymmetryPair> ga_search(std::span<const Descriptor> descriptors, const SpectralWeights& w,
                                           const GaConfig& cfg, std::size_t top_k) {
    return ga_search_detailed(descriptors, w, cfg, top_k).pairs;
}

}  // namespace symchaos
