#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlcc {

using Genome = std::vector<double>;

/// Solution error values strictly below this are reported as zero.
inline constexpr double kErrorFloor = 1e-8;

struct Bounds {
    std::vector<double> lower;
    std::vector<double> upper;

    static Bounds uniform(std::size_t dimension, double lo, double hi);

    std::size_t dimension() const noexcept { return lower.size(); }
    bool contains(std::span<const double> x) const noexcept;
};

struct Individual {
    Genome genome;
    double fitness = 0.0;
};

struct Population {
    std::vector<Individual> members;
    std::size_t generation = 0;

    std::size_t size() const noexcept { return members.size(); }
    /// Index of the smallest fitness; ties go to the lowest index.
    std::size_t best_index() const;
};

/// Smallest population for which every classic strategy has enough donors.
inline constexpr std::size_t kMinPopulation = 5;

/// A box-bounded minimization problem. `evaluate` must be pure and safe to
/// call concurrently from independent runs.
struct Problem {
    std::string id;
    std::size_t dimension = 0;
    Bounds bounds;
    double optimum_value = 0.0;
    std::function<double(std::span<const double>)> evaluate;
};

class BudgetExhausted : public std::runtime_error {
public:
    BudgetExhausted() : std::runtime_error("evaluation budget exhausted") {}
};

class InsufficientPopulation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class Budget {
public:
    explicit Budget(std::uint64_t max_evaluations) : max_(max_evaluations) {}

    /// The conventional 10^4 * D budget, optionally rescaled.
    static Budget for_dimension(std::size_t dimension, std::uint64_t multiplier = 10000) {
        return Budget(multiplier * dimension);
    }

    std::uint64_t max_evaluations() const noexcept { return max_; }
    std::uint64_t used() const noexcept { return used_; }
    std::uint64_t remaining() const noexcept { return max_ - used_; }
    bool exhausted() const noexcept { return used_ >= max_; }

    /// Throws BudgetExhausted when no evaluation is left.
    void consume();

private:
    std::uint64_t max_;
    std::uint64_t used_ = 0;
};

/// Seeded random stream. Draws are generated from a 64-bit Mersenne twister
/// with in-house transforms so sequences do not depend on the standard
/// library's distribution implementations.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    /// Uniform on the open interval (0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n). n must be positive.
    std::size_t index(std::size_t n);
    double normal(double mean = 0.0, double stddev = 1.0);
    double cauchy(double location = 0.0, double scale = 1.0);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

/// Evaluates `genome`, charging one evaluation to `budget`.
double evaluate(const Problem& problem, std::span<const double> genome, Budget& budget);

/// Moves out-of-range coordinates to the midpoint between the violated bound
/// and the parent's coordinate.
Genome repair_bounds(Genome child, std::span<const double> parent, const Bounds& bounds);

/// f - f*, clamped at zero and floored to zero below 1e-8.
double error_value(double fitness, double optimum) noexcept;

}  // namespace mlcc
