#include "mlcc/de_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mlcc {

std::size_t donor_count(MutationStrategy strategy) noexcept {
    switch (strategy) {
        case MutationStrategy::rand1: return 3;
        case MutationStrategy::best1: return 2;
        case MutationStrategy::rand2: return 5;
        case MutationStrategy::best2: return 4;
        case MutationStrategy::current_to_best1: return 2;
    }
    return 0;
}

std::string_view to_string(MutationStrategy strategy) noexcept {
    switch (strategy) {
        case MutationStrategy::rand1: return "rand/1";
        case MutationStrategy::best1: return "best/1";
        case MutationStrategy::rand2: return "rand/2";
        case MutationStrategy::best2: return "best/2";
        case MutationStrategy::current_to_best1: return "current-to-best/1";
    }
    return "?";
}

MutationStrategy parse_strategy(std::string_view text) {
    for (auto s : {MutationStrategy::rand1, MutationStrategy::best1, MutationStrategy::rand2,
                   MutationStrategy::best2, MutationStrategy::current_to_best1}) {
        if (to_string(s) == text) return s;
    }
    throw std::invalid_argument("unknown mutation strategy '" + std::string(text) + "'");
}

void Archive::set_capacity(std::size_t capacity, RandomSource& rng) {
    capacity_ = capacity;
    while (members_.size() > capacity_) {
        const std::size_t k = rng.index(members_.size());
        members_[k] = std::move(members_.back());
        members_.pop_back();
    }
}

void Archive::insert(Genome genome, RandomSource& rng) {
    if (capacity_ == 0) return;
    if (members_.size() < capacity_) {
        members_.push_back(std::move(genome));
    } else {
        members_[rng.index(members_.size())] = std::move(genome);
    }
}

std::vector<std::size_t> sample_distinct(std::size_t count, std::span<const std::size_t> exclude,
                                         std::size_t np, RandomSource& rng) {
    std::size_t excluded_in_range = 0;
    for (std::size_t k = 0; k < exclude.size(); ++k) {
        const std::size_t e = exclude[k];
        if (e < np && std::find(exclude.begin(), exclude.begin() + k, e) == exclude.begin() + k) {
            ++excluded_in_range;
        }
    }
    if (count + excluded_in_range > np) {
        throw InsufficientPopulation("need " + std::to_string(count) + " distinct donors from " +
                                     std::to_string(np - excluded_in_range) + " candidates");
    }
    std::vector<std::size_t> out;
    out.reserve(count);
    auto taken = [&](std::size_t c) {
        return std::find(exclude.begin(), exclude.end(), c) != exclude.end() ||
               std::find(out.begin(), out.end(), c) != out.end();
    };
    while (out.size() < count) {
        const std::size_t c = rng.index(np);
        if (!taken(c)) out.push_back(c);
    }
    return out;
}

namespace {

void check_f(double f) {
    if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("scale factor F must lie in [0, 1]");
}

}  // namespace

Genome mutate_classic(MutationStrategy strategy, std::size_t target_index,
                      std::span<const Individual> members, std::size_t best_index, double f,
                      RandomSource& rng) {
    check_f(f);
    const std::size_t exclude[] = {target_index};
    const auto r = sample_distinct(donor_count(strategy), exclude, members.size(), rng);
    const std::size_t dim = members[target_index].genome.size();
    const auto& best = members[best_index].genome;
    const auto& target = members[target_index].genome;
    auto x = [&](std::size_t k) -> const Genome& { return members[r[k]].genome; };

    Genome v(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        switch (strategy) {
            case MutationStrategy::rand1:
                v[j] = x(0)[j] + f * (x(1)[j] - x(2)[j]);
                break;
            case MutationStrategy::best1:
                v[j] = best[j] + f * (x(0)[j] - x(1)[j]);
                break;
            case MutationStrategy::rand2:
                v[j] = x(0)[j] + f * (x(1)[j] - x(2)[j]) + f * (x(3)[j] - x(4)[j]);
                break;
            case MutationStrategy::best2:
                v[j] = best[j] + f * (x(0)[j] - x(1)[j]) + f * (x(2)[j] - x(3)[j]);
                break;
            case MutationStrategy::current_to_best1:
                v[j] = target[j] + f * (best[j] - target[j]) + f * (x(0)[j] - x(1)[j]);
                break;
        }
    }
    return v;
}

Genome mutate_classic(MutationStrategy strategy, std::size_t target_index,
                      const Population& population, double f, RandomSource& rng) {
    return mutate_classic(strategy, target_index, population.members, population.best_index(), f,
                          rng);
}

Genome mutate_current_to_pbest(std::size_t target_index, std::span<const Individual> members,
                               std::span<const std::size_t> order, const Archive& archive,
                               double f, double p, RandomSource& rng,
                               std::vector<std::size_t>* donors) {
    check_f(f);
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0, 1]");
    const std::size_t np = members.size();
    if (np < 3) throw InsufficientPopulation("current-to-pbest/1 needs at least 3 members");

    const auto top = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(p * static_cast<double>(np) - 1e-12)), 1, np);
    const std::size_t pbest = order[rng.index(top)];

    std::size_t r1;
    do {
        r1 = rng.index(np);
    } while (r1 == target_index);
    // r2 indexes the union: [0, np) is the population, [np, np + |A|) the archive.
    std::size_t r2;
    do {
        r2 = rng.index(np + archive.size());
    } while (r2 == target_index || r2 == r1);

    const auto& xi = members[target_index].genome;
    const auto& xp = members[pbest].genome;
    const auto& x1 = members[r1].genome;
    const auto& x2 = r2 < np ? members[r2].genome : archive[r2 - np];

    Genome v(xi.size());
    for (std::size_t j = 0; j < xi.size(); ++j) {
        v[j] = xi[j] + f * (xp[j] - xi[j]) + f * (x1[j] - x2[j]);
    }
    if (donors) *donors = {pbest, r1, r2};
    return v;
}

Genome mutate_current_to_pbest(std::size_t target_index, const Population& population,
                               const Archive& archive, double f, double p, RandomSource& rng) {
    const auto order = fitness_order(population.members);
    return mutate_current_to_pbest(target_index, population.members, order, archive, f, p, rng);
}

Genome crossover_binomial(std::span<const double> target, std::span<const double> mutant,
                          double cr, RandomSource& rng) {
    if (target.size() != mutant.size()) throw std::invalid_argument("crossover: length mismatch");
    if (!(cr >= 0.0 && cr <= 1.0)) throw std::invalid_argument("CR must lie in [0, 1]");
    const std::size_t dim = target.size();
    const std::size_t j_rand = rng.index(dim);
    Genome u(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        u[j] = (rng.uniform() < cr || j == j_rand) ? mutant[j] : target[j];
    }
    return u;
}

Selection select_survivor(const Individual& target, const Individual& trial) {
    if (trial.fitness <= target.fitness) return {trial, true};
    return {target, false};
}

std::vector<std::size_t> fitness_order(std::span<const Individual> members) {
    std::vector<std::size_t> order(members.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return members[a].fitness < members[b].fitness;
    });
    return order;
}

}  // namespace mlcc
