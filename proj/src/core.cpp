#include "mlcc/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mlcc {

Bounds Bounds::uniform(std::size_t dimension, double lo, double hi) {
    if (!(lo < hi)) {
        throw std::invalid_argument("Bounds: lower bound must be below upper bound");
    }
    return Bounds{std::vector<double>(dimension, lo), std::vector<double>(dimension, hi)};
}

bool Bounds::contains(std::span<const double> x) const noexcept {
    if (x.size() != lower.size()) return false;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!(x[j] >= lower[j] && x[j] <= upper[j])) return false;
    }
    return true;
}

std::size_t Population::best_index() const {
    if (members.empty()) throw std::logic_error("best_index of empty population");
    std::size_t best = 0;
    for (std::size_t i = 1; i < members.size(); ++i) {
        if (members[i].fitness < members[best].fitness) best = i;
    }
    return best;
}

void Budget::consume() {
    if (used_ >= max_) throw BudgetExhausted();
    ++used_;
}

double RandomSource::uniform() {
    // 53 random mantissa bits centred in their cell: never 0, never 1.
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::size_t RandomSource::index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("RandomSource::index: empty range");
    const auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return std::min(k, n - 1);
}

double RandomSource::normal(double mean, double stddev) {
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return mean + stddev * spare_normal_;
    }
    // Marsaglia polar method
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * factor;
    has_spare_normal_ = true;
    return mean + stddev * u * factor;
}

double RandomSource::cauchy(double location, double scale) {
    return location + scale * std::tan(std::numbers::pi * (uniform() - 0.5));
}

double evaluate(const Problem& problem, std::span<const double> genome, Budget& budget) {
    budget.consume();
    return problem.evaluate(genome);
}

Genome repair_bounds(Genome child, std::span<const double> parent, const Bounds& bounds) {
    for (std::size_t j = 0; j < child.size(); ++j) {
        if (child[j] < bounds.lower[j]) {
            child[j] = 0.5 * (bounds.lower[j] + parent[j]);
        } else if (child[j] > bounds.upper[j]) {
            child[j] = 0.5 * (bounds.upper[j] + parent[j]);
        }
    }
    return child;
}

double error_value(double fitness, double optimum) noexcept {
    const double err = std::max(fitness - optimum, 0.0);
    return err < kErrorFloor ? 0.0 : err;
}

}  // namespace mlcc
