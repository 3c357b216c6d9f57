#include "cnmf/ga.hpp"

#include "cnmf/error.hpp"

#include <algorithm>
#include <string>

namespace cnmf {

void GaConfig::validate() const {
    if (pop_size < 2) throw ContractError("GaConfig: pop_size must be >= 2");
    if (generations < 1) throw ContractError("GaConfig: generations must be >= 1");
    if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) throw ContractError("GaConfig: crossover_prob outside [0,1]");
    if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) throw ContractError("GaConfig: mutation_prob outside [0,1]");
    if (!(mutation_sigma >= 0.0)) throw ContractError("GaConfig: mutation_sigma must be >= 0");
    if (tournament_size < 1) throw ContractError("GaConfig: tournament_size must be >= 1");
}

std::vector<Chromosome> init_population(std::size_t t_len, const GaConfig& config, Rng& rng) {
    if (t_len < 1) throw ContractError("init_population: chromosome length must be >= 1");
    config.validate();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Chromosome> pop(config.pop_size);
    for (auto& c : pop) {
        c.genes.resize(t_len);
        for (double& g : c.genes) g = unit(rng);
    }
    return pop;
}

std::vector<Chromosome> init_population(std::size_t t_len, const GaConfig& config) {
    Rng rng(config.seed);
    return init_population(t_len, config, rng);
}

std::vector<Chromosome> tournament_select(std::span<const Chromosome> pop, const GaConfig& config, Rng& rng) {
    if (pop.empty()) throw ContractError("tournament_select: empty population");
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (!pop[i].fitness) {
            throw ContractError("tournament_select: chromosome " + std::to_string(i) + " has no fitness");
        }
    }
    std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
    std::vector<Chromosome> out;
    out.reserve(config.pop_size);
    for (std::size_t s = 0; s < config.pop_size; ++s) {
        std::size_t winner = pick(rng);
        for (std::size_t draw = 1; draw < config.tournament_size; ++draw) {
            const std::size_t challenger = pick(rng);
            if (*pop[challenger].fitness > *pop[winner].fitness) winner = challenger;
        }
        out.push_back(pop[winner]);
    }
    return out;
}

std::pair<Chromosome, Chromosome> crossover_at(const Chromosome& a, const Chromosome& b, std::size_t cut) {
    if (a.genes.size() != b.genes.size()) throw ContractError("crossover: gene lengths differ");
    if (cut < 1 || cut >= a.genes.size()) throw ContractError("crossover: cut point out of range");
    Chromosome x{a.genes, std::nullopt};
    Chromosome y{b.genes, std::nullopt};
    std::swap_ranges(x.genes.begin() + static_cast<std::ptrdiff_t>(cut), x.genes.end(),
                     y.genes.begin() + static_cast<std::ptrdiff_t>(cut));
    return {std::move(x), std::move(y)};
}

std::pair<Chromosome, Chromosome> one_point_crossover(const Chromosome& a, const Chromosome& b,
                                                      const GaConfig& config, Rng& rng) {
    if (a.genes.size() != b.genes.size()) throw ContractError("crossover: gene lengths differ");
    if (a.genes.size() < 2) return {a, b};
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) >= config.crossover_prob) return {a, b};
    std::uniform_int_distribution<std::size_t> cut(1, a.genes.size() - 1);
    return crossover_at(a, b, cut(rng));
}

Chromosome mutate(const Chromosome& c, const GaConfig& config, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    Chromosome out = c;
    bool changed = false;
    for (double& g : out.genes) {
        if (unit(rng) < config.mutation_prob) {
            const double mutated = std::clamp(g + config.mutation_sigma * noise(rng), 0.0, 1.0);
            changed = changed || mutated != g;
            g = mutated;
        }
    }
    if (changed) out.fitness.reset();
    return out;
}

namespace {

template <class E>
[[noreturn]] void rethrow_with_context(const E& e, const std::string& where) {
    throw E(where + ": " + e.what());
}

double evaluate(const FitnessFn& fitness_fn, const Chromosome& c, std::size_t generation, std::size_t index) {
    const std::string where =
        "GA generation " + std::to_string(generation) + ", chromosome " + std::to_string(index);
    try {
        return fitness_fn(c.genes);
    } catch (const SingularError& e) {
        rethrow_with_context(e, where);
    } catch (const ContractError& e) {
        rethrow_with_context(e, where);
    } catch (const DataError& e) {
        rethrow_with_context(e, where);
    } catch (const std::exception& e) {
        throw std::runtime_error(where + ": " + e.what());
    }
}

}  // namespace

GaTrace optimize(const FitnessFn& fitness_fn, std::size_t t_len, const GaConfig& config) {
    config.validate();
    Rng rng(config.seed);
    std::vector<Chromosome> pop = init_population(t_len, config, rng);

    GaTrace trace;
    std::size_t stale = 0;
    for (std::size_t gen = 0; gen < config.generations; ++gen) {
        if (gen > 0) {
            auto parents = tournament_select(pop, config, rng);
            std::vector<Chromosome> offspring;
            offspring.reserve(parents.size());
            for (std::size_t i = 0; i + 1 < parents.size(); i += 2) {
                auto [x, y] = one_point_crossover(parents[i], parents[i + 1], config, rng);
                offspring.push_back(std::move(x));
                offspring.push_back(std::move(y));
            }
            if (parents.size() % 2 == 1) offspring.push_back(parents.back());
            for (auto& c : offspring) c = mutate(c, config, rng);
            pop = std::move(offspring);
        }

        bool improved = false;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (!pop[i].fitness) {
                pop[i].fitness = evaluate(fitness_fn, pop[i], gen, i);
                ++trace.evaluations;
            }
            if (!trace.best.fitness || *pop[i].fitness > *trace.best.fitness) {
                trace.best = pop[i];
                improved = true;
            }
        }
        trace.best_fitness_per_generation.push_back(*trace.best.fitness);

        if (gen > 0) stale = improved ? 0 : stale + 1;
        if (config.patience > 0 && stale >= config.patience) break;
    }
    return trace;
}

}  // namespace cnmf
