#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "mlcc/core.hpp"

namespace mlcc {

enum class MutationStrategy { rand1, best1, rand2, best2, current_to_best1 };

/// Number of distinct donors (excluding the target) each strategy needs.
std::size_t donor_count(MutationStrategy strategy) noexcept;
std::string_view to_string(MutationStrategy strategy) noexcept;
/// Parses "rand/1", "best/1", "rand/2", "best/2", "current-to-best/1".
MutationStrategy parse_strategy(std::string_view text);

/// Bounded store of defeated parents. Overflow evicts a uniformly random member.
class Archive {
public:
    explicit Archive(std::size_t capacity = 0) : capacity_(capacity) {}

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }
    const Genome& operator[](std::size_t k) const { return members_[k]; }
    const std::vector<Genome>& members() const noexcept { return members_; }

    void set_capacity(std::size_t capacity, RandomSource& rng);
    void insert(Genome genome, RandomSource& rng);
    void clear() noexcept { members_.clear(); }

private:
    std::size_t capacity_;
    std::vector<Genome> members_;
};

/// `count` distinct indices from [0, np), none of them in `exclude`.
std::vector<std::size_t> sample_distinct(std::size_t count, std::span<const std::size_t> exclude,
                                         std::size_t np, RandomSource& rng);

/// Classic mutations. `best_index` is the generation's best member, held
/// fixed by the caller for the whole generation.
Genome mutate_classic(MutationStrategy strategy, std::size_t target_index,
                      std::span<const Individual> members, std::size_t best_index, double f,
                      RandomSource& rng);

/// Overload that takes the current argmin as the best member.
Genome mutate_classic(MutationStrategy strategy, std::size_t target_index,
                      const Population& population, double f, RandomSource& rng);

/// current-to-pbest/1 with optional archive. `order` lists member indices
/// sorted from best to worst fitness; pbest is drawn uniformly from its first
/// ceil(p * NP) entries.
Genome mutate_current_to_pbest(std::size_t target_index, std::span<const Individual> members,
                               std::span<const std::size_t> order, const Archive& archive,
                               double f, double p, RandomSource& rng,
                               std::vector<std::size_t>* donors = nullptr);

Genome mutate_current_to_pbest(std::size_t target_index, const Population& population,
                               const Archive& archive, double f, double p, RandomSource& rng);

/// Binomial crossover; the coordinate at a random j_rand always comes from the mutant.
Genome crossover_binomial(std::span<const double> target, std::span<const double> mutant,
                          double cr, RandomSource& rng);

struct Selection {
    Individual survivor;
    bool succeeded;
};

/// One-to-one survival: the trial wins ties.
Selection select_survivor(const Individual& target, const Individual& trial);

/// Member indices sorted by ascending fitness; ties keep index order.
std::vector<std::size_t> fitness_order(std::span<const Individual> members);

}  // namespace mlcc
