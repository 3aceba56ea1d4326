#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gaitlab/gait.hpp"
#include "gaitlab/rng.hpp"

namespace gaitlab {

// Generational evolutionary algorithm over [0,1]^N genomes. Each new
// generation is composed of four quarters:
//   A  the single best individual verbatim plus fitness-proportionate picks,
//      picks mutated
//   B  two-cut crossover children of fitness-proportionate parent pairs,
//      mutated
//   C  freshly randomized genomes
//   D  the most novel individuals (mean genome-space distance to the rest),
//      mutated
// All mutation output is clamped back into [0,1].

struct EmptyPopulation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct LengthMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Evaluator failure surfaced with the failing generation and individual.
struct EvolutionAborted : std::runtime_error {
    EvolutionAborted(int generation, std::int64_t individual_id, const std::string& why)
        : std::runtime_error("evaluation failed at generation " + std::to_string(generation) +
                             ", individual " + std::to_string(individual_id) + ": " + why),
          generation(generation),
          individual_id(individual_id) {}
    int generation;
    std::int64_t individual_id;
};

struct EvolutionConfig {
    int population_size = 256;  // divisible by 4
    int generations = 50;
    double mutation_prob = 0.5;  // per-gene application probability, (0,1]
    int genome_len = 6;
    std::uint64_t rng_seed = 1;
    int threads = 0;  // evaluation threads; 0 = hardware concurrency
};

struct Individual {
    GaitGenome genome;
    double fitness = std::numeric_limits<double>::quiet_NaN();
    std::int64_t id = 0;  // creation order; deterministic tie-break
};

struct GenerationStats {
    int generation = 0;  // 1-based
    double fitness_mean = 0.0;
    double fitness_std = 0.0;  // population std (divide by n)
    double best_fitness = 0.0;
    std::vector<double> gene_mean;
    std::vector<double> gene_std;
};

// Fitness function; the second argument is a per-individual seed derived
// from the run seed and the individual's id.
using FitnessFn = std::function<double(const GaitGenome&, std::uint64_t)>;

// Where each slot of a generation came from.
enum class Origin { Elite, SelectedParent, Child, FreshRandom, Novelty };

struct NextGeneration {
    std::vector<Individual> population;
    std::vector<Origin> origins;
};

inline void validate_config(const EvolutionConfig& cfg) {
    if (cfg.population_size < 4 || cfg.population_size % 4 != 0) {
        throw std::invalid_argument("population_size must be a positive multiple of 4");
    }
    if (cfg.generations < 1) throw std::invalid_argument("generations must be >= 1");
    if (!(cfg.mutation_prob > 0.0 && cfg.mutation_prob <= 1.0)) {
        throw std::invalid_argument("mutation_prob must be in (0,1]");
    }
    if (cfg.genome_len < 1) throw std::invalid_argument("genome_len must be >= 1");
}

inline GaitGenome random_genome(int len, Rng& rng) {
    GaitGenome g(len);
    for (double& v : g) v = rng.uniform();
    return g;
}

// population_size individuals, every gene uniform in [0,1].
inline std::vector<Individual> init_population(const EvolutionConfig& cfg, Rng& rng,
                                               std::int64_t& next_id) {
    validate_config(cfg);
    std::vector<Individual> pop;
    pop.reserve(cfg.population_size);
    for (int i = 0; i < cfg.population_size; ++i) {
        pop.push_back({random_genome(cfg.genome_len, rng), std::numeric_limits<double>::quiet_NaN(),
                       next_id++});
    }
    return pop;
}

namespace detail {

// Roulette weights shifted to be non-negative: w(i) = f(i) - min(f) + eps.
// Handles all-negative fitness; the worst individual keeps only the eps
// floor and is nearly unselectable.
inline std::vector<double> roulette_weights(const std::vector<Individual>& pop) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const Individual& ind : pop) {
        lo = std::min(lo, ind.fitness);
        hi = std::max(hi, ind.fitness);
    }
    const double eps = 1e-6 * (hi - lo + 1.0);
    std::vector<double> w(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) w[i] = pop[i].fitness - lo + eps;
    return w;
}

inline std::size_t spin_roulette(const std::vector<double>& weights, double total, Rng& rng) {
    double ticket = rng.uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        ticket -= weights[i];
        if (ticket < 0.0) return i;
    }
    return weights.size() - 1;
}

inline std::size_t best_index(const std::vector<Individual>& pop) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop.size(); ++i) {
        if (pop[i].fitness > pop[best].fitness ||
            (pop[i].fitness == pop[best].fitness && pop[i].id < pop[best].id)) {
            best = i;
        }
    }
    return best;
}

}  // namespace detail

// Roulette-wheel sampling with replacement over min-shifted fitness.
inline std::vector<std::size_t> fitness_proportionate_select(const std::vector<Individual>& pop,
                                                             int count, Rng& rng) {
    if (pop.empty()) throw EmptyPopulation("cannot select from an empty population");
    const std::vector<double> w = detail::roulette_weights(pop);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<std::size_t> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(detail::spin_roulette(w, total, rng));
    return out;
}

// Novelty score per individual: mean Euclidean distance in genome space to
// every other population member.
inline std::vector<double> novelty_scores(const std::vector<Individual>& pop) {
    const std::size_t n = pop.size();
    std::vector<double> score(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < pop[i].genome.size(); ++k) {
                const double d = pop[i].genome[k] - pop[j].genome[k];
                d2 += d * d;
            }
            const double d = std::sqrt(d2);
            score[i] += d;
            score[j] += d;
        }
    }
    if (n > 1) {
        for (double& s : score) s /= static_cast<double>(n - 1);
    }
    return score;
}

// Indices of the `count` most novel individuals; ties go to the lower id, so
// the result is invariant under population reordering.
inline std::vector<std::size_t> novelty_select(const std::vector<Individual>& pop, int count) {
    if (pop.empty()) throw EmptyPopulation("cannot select from an empty population");
    const std::vector<double> score = novelty_scores(pop);
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return pop[a].id < pop[b].id;
    });
    order.resize(std::min<std::size_t>(count, order.size()));
    return order;
}

// Two-cut segment exchange: the child takes genes [i,j) from parent_a and
// the rest from parent_b. (The mapping phase of classical PMX is vacuous on
// duplicate-free real vectors, leaving exactly this.)
inline GaitGenome pmx_crossover_at(const GaitGenome& parent_a, const GaitGenome& parent_b,
                                   std::size_t i, std::size_t j) {
    if (parent_a.size() != parent_b.size()) {
        throw LengthMismatch("crossover parents have different genome lengths");
    }
    GaitGenome child = parent_b;
    for (std::size_t k = i; k < j; ++k) child[k] = parent_a[k];
    return child;
}

// Cut points i<j drawn uniformly over {0..len} pairs.
inline GaitGenome pmx_crossover(const GaitGenome& parent_a, const GaitGenome& parent_b, Rng& rng) {
    if (parent_a.size() != parent_b.size()) {
        throw LengthMismatch("crossover parents have different genome lengths");
    }
    const std::uint64_t n = parent_a.size() + 1;
    std::uint64_t i, j;
    do {
        i = rng.below(n);
        j = rng.below(n);
    } while (i == j);
    if (i > j) std::swap(i, j);
    return pmx_crossover_at(parent_a, parent_b, i, j);
}

// Per-gene mutation: with probability `prob` add a delta uniform in
// [-prob^2, prob^2), then clamp to [0,1].
inline GaitGenome uniform_mutate(GaitGenome genome, double prob, Rng& rng) {
    const double mag = prob * prob;
    for (double& gene : genome) {
        if (rng.uniform() < prob) {
            gene = std::clamp(gene + rng.uniform(-mag, mag), 0.0, 1.0);
        }
    }
    return genome;
}

// Quartered next generation; see the header comment for the composition.
// Slot layout: [elite, A picks..., B children..., C randoms..., D novelty...].
inline NextGeneration next_generation(const std::vector<Individual>& pop,
                                      const EvolutionConfig& cfg, Rng& rng,
                                      std::int64_t& next_id) {
    validate_config(cfg);
    if (static_cast<int>(pop.size()) != cfg.population_size) {
        throw std::invalid_argument("population size does not match config");
    }
    const int quarter = cfg.population_size / 4;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    NextGeneration next;
    next.population.reserve(cfg.population_size);
    next.origins.reserve(cfg.population_size);
    const auto emit = [&](GaitGenome genome, Origin origin) {
        next.population.push_back({std::move(genome), nan, next_id++});
        next.origins.push_back(origin);
    };

    // A: pristine elite, then mutated fitness-proportionate picks
    emit(pop[detail::best_index(pop)].genome, Origin::Elite);
    for (std::size_t idx : fitness_proportionate_select(pop, quarter - 1, rng)) {
        emit(uniform_mutate(pop[idx].genome, cfg.mutation_prob, rng), Origin::SelectedParent);
    }
    // B: crossover children of fitness-proportionate parent pairs
    for (int i = 0; i < quarter; ++i) {
        const auto parents = fitness_proportionate_select(pop, 2, rng);
        GaitGenome child = pmx_crossover(pop[parents[0]].genome, pop[parents[1]].genome, rng);
        emit(uniform_mutate(std::move(child), cfg.mutation_prob, rng), Origin::Child);
    }
    // C: fresh random genomes
    for (int i = 0; i < quarter; ++i) emit(random_genome(cfg.genome_len, rng), Origin::FreshRandom);
    // D: mutated novelty picks
    for (std::size_t idx : novelty_select(pop, quarter)) {
        emit(uniform_mutate(pop[idx].genome, cfg.mutation_prob, rng), Origin::Novelty);
    }
    return next;
}

inline GenerationStats compute_stats(int generation, const std::vector<Individual>& pop) {
    GenerationStats s;
    s.generation = generation;
    const double n = static_cast<double>(pop.size());
    double sum = 0.0, sum2 = 0.0;
    s.best_fitness = -std::numeric_limits<double>::infinity();
    for (const Individual& ind : pop) {
        sum += ind.fitness;
        sum2 += ind.fitness * ind.fitness;
        s.best_fitness = std::max(s.best_fitness, ind.fitness);
    }
    s.fitness_mean = sum / n;
    s.fitness_std = std::sqrt(std::max(0.0, sum2 / n - s.fitness_mean * s.fitness_mean));
    const std::size_t len = pop.empty() ? 0 : pop.front().genome.size();
    s.gene_mean.assign(len, 0.0);
    s.gene_std.assign(len, 0.0);
    for (std::size_t k = 0; k < len; ++k) {
        double gs = 0.0, gs2 = 0.0;
        for (const Individual& ind : pop) {
            gs += ind.genome[k];
            gs2 += ind.genome[k] * ind.genome[k];
        }
        s.gene_mean[k] = gs / n;
        s.gene_std[k] = std::sqrt(std::max(0.0, gs2 / n - s.gene_mean[k] * s.gene_mean[k]));
    }
    return s;
}

namespace detail {

// Evaluates the whole population; per-individual seeds are pre-derived from
// (run seed, id), so the thread schedule cannot affect any result. The
// lowest-index failure wins to keep error reporting deterministic.
inline void evaluate_population(std::vector<Individual>& pop, const FitnessFn& fn,
                                std::uint64_t run_seed, int generation, int threads) {
    const std::size_t n = pop.size();
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(n)));

    std::vector<std::string> errors(n);
    std::vector<char> failed(n, 0);
    const auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                pop[i].fitness = fn(pop[i].genome, derive_seed(run_seed, pop[i].id));
            } catch (const std::exception& e) {
                failed[i] = 1;
                errors[i] = e.what();
            }
        }
    };
    if (threads == 1) {
        work(0, n);
    } else {
        std::vector<std::thread> workers;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin < end) workers.emplace_back(work, begin, end);
        }
        for (std::thread& w : workers) w.join();
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (failed[i]) throw EvolutionAborted(generation, pop[i].id, errors[i]);
    }
}

}  // namespace detail

struct RunResult {
    std::vector<Individual> final_population;  // evaluated
    std::vector<GenerationStats> stats;        // one entry per generation
};

using ProgressSink = std::function<void(const GenerationStats&)>;

// Full run: init, evaluate, then (stats, next_generation, evaluate) until
// `generations` evaluated generations. Reproducible from (config, evaluator).
inline RunResult run_evolution(const EvolutionConfig& cfg, const FitnessFn& evaluator,
                               const ProgressSink& progress = {}) {
    validate_config(cfg);
    Rng rng(cfg.rng_seed);
    std::int64_t next_id = 0;

    RunResult result;
    std::vector<Individual> pop = init_population(cfg, rng, next_id);
    detail::evaluate_population(pop, evaluator, cfg.rng_seed, 1, cfg.threads);
    result.stats.push_back(compute_stats(1, pop));
    if (progress) progress(result.stats.back());

    for (int gen = 2; gen <= cfg.generations; ++gen) {
        pop = next_generation(pop, cfg, rng, next_id).population;
        detail::evaluate_population(pop, evaluator, cfg.rng_seed, gen, cfg.threads);
        result.stats.push_back(compute_stats(gen, pop));
        if (progress) progress(result.stats.back());
    }
    result.final_population = std::move(pop);
    return result;
}

}  // namespace gaitlab
