#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace cnmf {

using Rng = std::mt19937_64;

/// Real genes in [0,1], one per class pair; fitness is empty until evaluated.
struct Chromosome {
    std::vector<double> genes;
    std::optional<double> fitness;
};

struct GaConfig {
    std::size_t pop_size = 10;
    std::size_t generations = 20;  ///< hard cap on evaluated generations, the initial one included
    double crossover_prob = 0.2;   ///< per mating pair
    double mutation_prob = 0.05;   ///< per gene
    double mutation_sigma = 0.1;
    std::size_t tournament_size = 3;
    std::uint64_t seed = 0;
    std::size_t patience = 5;  ///< stop after this many generations without improvement; 0 disables

    void validate() const;
};

struct GaTrace {
    std::vector<double> best_fitness_per_generation;  ///< best-so-far, one entry per evaluated generation
    Chromosome best;
    std::size_t evaluations = 0;  ///< fitness_fn calls
};

using FitnessFn = std::function<double(std::span<const double>)>;

std::vector<Chromosome> init_population(std::size_t t_len, const GaConfig& config, Rng& rng);
std::vector<Chromosome> init_population(std::size_t t_len, const GaConfig& config);

/// pop_size tournaments of tournament_size draws with replacement; highest fitness wins, first drawn on ties.
std::vector<Chromosome> tournament_select(std::span<const Chromosome> pop, const GaConfig& config, Rng& rng);

/// Swap the tails of a and b after position `cut` (1 <= cut < length).
std::pair<Chromosome, Chromosome> crossover_at(const Chromosome& a, const Chromosome& b, std::size_t cut);

/// With probability crossover_prob, crossover_at a uniformly drawn cut; otherwise copies.
/// Length-1 chromosomes are returned unchanged without consuming randomness.
std::pair<Chromosome, Chromosome> one_point_crossover(const Chromosome& a, const Chromosome& b,
                                                      const GaConfig& config, Rng& rng);

/// Each gene, with probability mutation_prob, gets N(0, mutation_sigma²) noise and is clamped to [0,1].
Chromosome mutate(const Chromosome& c, const GaConfig& config, Rng& rng);

GaTrace optimize(const FitnessFn& fitness_fn, std::size_t t_len, const GaConfig& config);

}  // namespace cnmf
