#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mlcc/core.hpp"

namespace mlcc::bench {

/// Base functions, each with minimum 0 at the origin. Inputs are rescaled
/// internally to each function's customary search range.
enum class BaseFunction {
    sphere,
    elliptic,
    bent_cigar,
    discus,
    rosenbrock,
    ackley,
    rastrigin,
    griewank,
    mod_schwefel,
};

enum class Category { unimodal, multimodal, hybrid, composition };

std::string_view to_string(BaseFunction f) noexcept;
std::string_view to_string(Category c) noexcept;

double evaluate_base(BaseFunction f, std::span<const double> z);

class DomainViolation : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

inline constexpr double kDomainLower = -100.0;
inline constexpr double kDomainUpper = 100.0;
inline constexpr double kShiftLimit = 80.0;

struct HybridBlock {
    BaseFunction base;
    std::size_t size;
    Eigen::MatrixXd rotation;
};

struct CompositionComponent {
    BaseFunction base;
    Eigen::VectorXd center;
    Eigen::MatrixXd rotation;
    double sigma;
    double lambda;
    double offset;
};

/// A shifted/rotated benchmark. Which fields are used depends on the category:
/// unimodal and multimodal problems use `base`, `shift` and `rotation`;
/// hybrids split the permuted, shifted coordinates into `blocks`; compositions
/// blend `components`.
struct BenchProblem {
    std::string id;
    Category category = Category::unimodal;
    std::size_t dimension = 0;
    double bias = 0.0;
    std::uint64_t seed = 0;

    BaseFunction base = BaseFunction::sphere;
    Eigen::VectorXd shift;
    Eigen::MatrixXd rotation;

    std::vector<std::size_t> permutation;
    std::vector<HybridBlock> blocks;

    std::vector<CompositionComponent> components;

    /// Throws DomainViolation outside [-100, 100]^D.
    double evaluate(std::span<const double> x) const;
    /// Location of the known optimum (the first component's centre for compositions).
    const Eigen::VectorXd& optimum_location() const;
    /// Adapts to the optimizer's Problem; the returned object shares this data.
    Problem as_problem() const;
    /// Digest over all generated data (shift, rotations, permutation, ...).
    std::uint64_t digest() const;
};

/// Orthogonal matrix from the QR factorization of a standard-normal matrix.
Eigen::MatrixXd random_rotation(std::size_t dimension, RandomSource& rng);

/// The 12-problem suite: 2 unimodal, 6 multimodal, 2 hybrid, 2 composition.
std::vector<BenchProblem> make_suite(std::size_t dimension, std::uint64_t seed);

nlohmann::json suite_manifest(const std::vector<BenchProblem>& suite, std::uint64_t seed);

}  // namespace mlcc::bench
