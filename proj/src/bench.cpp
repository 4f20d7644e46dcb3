#include "mlcc/bench.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <bit>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <iomanip>

namespace mlcc::bench {

std::string_view to_string(BaseFunction f) noexcept {
    switch (f) {
        case BaseFunction::sphere: return "sphere";
        case BaseFunction::elliptic: return "elliptic";
        case BaseFunction::bent_cigar: return "bent_cigar";
        case BaseFunction::discus: return "discus";
        case BaseFunction::rosenbrock: return "rosenbrock";
        case BaseFunction::ackley: return "ackley";
        case BaseFunction::rastrigin: return "rastrigin";
        case BaseFunction::griewank: return "griewank";
        case BaseFunction::mod_schwefel: return "mod_schwefel";
    }
    return "?";
}

std::string_view to_string(Category c) noexcept {
    switch (c) {
        case Category::unimodal: return "unimodal";
        case Category::multimodal: return "multimodal";
        case Category::hybrid: return "hybrid";
        case Category::composition: return "composition";
    }
    return "?";
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSchwefelPeak = 420.9687462275036;

double schwefel_g(double z, double dim) {
    if (std::abs(z) <= 500.0) return z * std::sin(std::sqrt(std::abs(z)));
    if (z > 500.0) {
        const double m = 500.0 - std::fmod(z, 500.0);
        return m * std::sin(std::sqrt(std::abs(m))) - (z - 500.0) * (z - 500.0) / (10000.0 * dim);
    }
    const double m = std::fmod(std::abs(z), 500.0) - 500.0;
    return m * std::sin(std::sqrt(std::abs(m))) + (z + 500.0) * (z + 500.0) / (10000.0 * dim);
}

}  // namespace

double evaluate_base(BaseFunction f, std::span<const double> z) {
    const std::size_t n = z.size();
    if (n == 0) return 0.0;
    const double dn = static_cast<double>(n);
    double s = 0.0;
    switch (f) {
        case BaseFunction::sphere:
            for (double v : z) s += v * v;
            return s;
        case BaseFunction::elliptic:
            for (std::size_t i = 0; i < n; ++i) {
                const double e = n > 1 ? 6.0 * static_cast<double>(i) / (dn - 1.0) : 0.0;
                s += std::pow(10.0, e) * z[i] * z[i];
            }
            return s;
        case BaseFunction::bent_cigar:
            for (std::size_t i = 1; i < n; ++i) s += z[i] * z[i];
            return z[0] * z[0] + 1e6 * s;
        case BaseFunction::discus:
            for (std::size_t i = 1; i < n; ++i) s += z[i] * z[i];
            return 1e6 * z[0] * z[0] + s;
        case BaseFunction::rosenbrock: {
            // shifted so the origin maps to the all-ones minimum
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const double a = z[i] * 0.02048 + 1.0;
                const double b = z[i + 1] * 0.02048 + 1.0;
                s += 100.0 * (a * a - b) * (a * a - b) + (a - 1.0) * (a - 1.0);
            }
            return s;
        }
        case BaseFunction::ackley: {
            double sq = 0.0, cs = 0.0;
            for (double v : z) {
                sq += v * v;
                cs += std::cos(kTwoPi * v);
            }
            const double e = std::exp(1.0);
            const double value = 20.0 * (1.0 - std::exp(-0.2 * std::sqrt(sq / dn))) +
                                 (e - std::exp(cs / dn));
            return std::max(value, 0.0);
        }
        case BaseFunction::rastrigin:
            for (double v : z) {
                const double x = v * 0.0512;
                s += x * x + 10.0 * (1.0 - std::cos(kTwoPi * x));
            }
            return s;
        case BaseFunction::griewank: {
            double prod = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double x = z[i] * 6.0;
                s += x * x / 4000.0;
                prod *= std::cos(x / std::sqrt(static_cast<double>(i + 1)));
            }
            return s + (1.0 - prod);
        }
        case BaseFunction::mod_schwefel: {
            const double peak = schwefel_g(kSchwefelPeak, dn);
            for (double v : z) s += std::max(0.0, peak - schwefel_g(v * 10.0 + kSchwefelPeak, dn));
            return s;
        }
    }
    return 0.0;
}

Eigen::MatrixXd random_rotation(std::size_t dimension, RandomSource& rng) {
    const auto d = static_cast<Eigen::Index>(dimension);
    if (d == 0) return Eigen::MatrixXd(0, 0);
    Eigen::MatrixXd a(d, d);
    for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index r = 0; r < d; ++r) a(r, c) = rng.normal();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index c = 0; c < d; ++c) {
        if (r(c, c) < 0.0) q.col(c) *= -1.0;
    }
    return q;
}

double BenchProblem::evaluate(std::span<const double> x) const {
    if (x.size() != dimension) throw DomainViolation(id + ": dimension mismatch");
    for (double v : x) {
        if (!(v >= kDomainLower && v <= kDomainUpper)) {
            throw DomainViolation(id + ": point outside [-100, 100]^D");
        }
    }
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));

    switch (category) {
        case Category::unimodal:
        case Category::multimodal: {
            const Eigen::VectorXd z = rotation * (xv - shift);
            return bias + evaluate_base(base, {z.data(), dimension});
        }
        case Category::hybrid: {
            const Eigen::VectorXd shifted = xv - shift;
            Eigen::VectorXd permuted(shifted.size());
            for (std::size_t j = 0; j < dimension; ++j) {
                permuted(static_cast<Eigen::Index>(j)) =
                    shifted(static_cast<Eigen::Index>(permutation[j]));
            }
            double total = 0.0;
            Eigen::Index start = 0;
            for (const auto& block : blocks) {
                const auto len = static_cast<Eigen::Index>(block.size);
                const Eigen::VectorXd z = block.rotation * permuted.segment(start, len);
                total += evaluate_base(block.base, {z.data(), block.size});
                start += len;
            }
            return bias + total;
        }
        case Category::composition: {
            const std::size_t n = components.size();
            std::vector<double> weight(n, 0.0);
            std::vector<double> value(n, 0.0);
            std::ptrdiff_t exact = -1;
            for (std::size_t k = 0; k < n; ++k) {
                const auto& c = components[k];
                const Eigen::VectorXd d = xv - c.center;
                const double dist2 = d.squaredNorm();
                if (dist2 == 0.0 && exact < 0) exact = static_cast<std::ptrdiff_t>(k);
                const Eigen::VectorXd z = c.rotation * d;
                value[k] = c.lambda * evaluate_base(c.base, {z.data(), dimension}) + c.offset;
                if (dist2 > 0.0) {
                    weight[k] = std::exp(-dist2 / (2.0 * static_cast<double>(dimension) *
                                                   c.sigma * c.sigma)) /
                                std::sqrt(dist2);
                }
            }
            if (exact >= 0) {
                std::fill(weight.begin(), weight.end(), 0.0);
                weight[static_cast<std::size_t>(exact)] = 1.0;
            }
            double wsum = 0.0;
            for (double w : weight) wsum += w;
            if (wsum == 0.0) {
                std::fill(weight.begin(), weight.end(), 1.0);
                wsum = static_cast<double>(n);
            }
            double total = 0.0;
            for (std::size_t k = 0; k < n; ++k) total += weight[k] / wsum * value[k];
            return bias + total;
        }
    }
    return bias;
}

const Eigen::VectorXd& BenchProblem::optimum_location() const {
    return category == Category::composition ? components.front().center : shift;
}

Problem BenchProblem::as_problem() const {
    auto self = std::make_shared<const BenchProblem>(*this);
    Problem p;
    p.id = id;
    p.dimension = dimension;
    p.bounds = Bounds::uniform(dimension, kDomainLower, kDomainUpper);
    p.optimum_value = bias;
    p.evaluate = [self](std::span<const double> x) { return self->evaluate(x); };
    return p;
}

namespace {

struct Digest {
    std::uint64_t h = 0xcbf29ce484222325ull;
    void add(std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xffu;
            h *= 0x100000001b3ull;
        }
    }
    void add(double v) { add(std::bit_cast<std::uint64_t>(v)); }
    void add(const Eigen::MatrixXd& m) {
        add(static_cast<std::uint64_t>(m.size()));
        for (Eigen::Index k = 0; k < m.size(); ++k) add(m.data()[k]);
    }
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

Eigen::VectorXd random_shift(std::size_t dimension, RandomSource& rng) {
    Eigen::VectorXd o(static_cast<Eigen::Index>(dimension));
    for (Eigen::Index j = 0; j < o.size(); ++j) o(j) = rng.uniform(-kShiftLimit, kShiftLimit);
    return o;
}

BenchProblem simple(std::string id, Category cat, BaseFunction base, bool rotated,
                    std::size_t dim, std::uint64_t seed) {
    RandomSource rng(seed);
    BenchProblem p;
    p.id = std::move(id);
    p.category = cat;
    p.dimension = dim;
    p.seed = seed;
    p.base = base;
    p.shift = random_shift(dim, rng);
    const auto d = static_cast<Eigen::Index>(dim);
    p.rotation = rotated ? random_rotation(dim, rng) : Eigen::MatrixXd::Identity(d, d);
    return p;
}

BenchProblem hybrid(std::string id, const std::array<BaseFunction, 3>& bases, std::size_t dim,
                    std::uint64_t seed) {
    RandomSource rng(seed);
    BenchProblem p;
    p.id = std::move(id);
    p.category = Category::hybrid;
    p.dimension = dim;
    p.seed = seed;
    p.shift = random_shift(dim, rng);
    p.permutation.resize(dim);
    std::iota(p.permutation.begin(), p.permutation.end(), std::size_t{0});
    for (std::size_t j = dim; j > 1; --j) std::swap(p.permutation[j - 1], p.permutation[rng.index(j)]);
    const auto first = static_cast<std::size_t>(std::ceil(0.3 * static_cast<double>(dim)));
    const std::size_t second = std::min(first, dim - first);
    const std::array<std::size_t, 3> sizes{first, second, dim - first - second};
    for (std::size_t b = 0; b < 3; ++b) {
        p.blocks.push_back({bases[b], sizes[b], random_rotation(sizes[b], rng)});
    }
    return p;
}

struct ComponentSpec {
    BaseFunction base;
    double sigma;
    double lambda;
};

BenchProblem composition(std::string id, const std::array<ComponentSpec, 3>& specs,
                         std::size_t dim, std::uint64_t seed) {
    RandomSource rng(seed);
    BenchProblem p;
    p.id = std::move(id);
    p.category = Category::composition;
    p.dimension = dim;
    p.seed = seed;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        Eigen::VectorXd center = random_shift(dim, rng);
        Eigen::MatrixXd rot = random_rotation(dim, rng);
        p.components.push_back({specs[k].base, std::move(center), std::move(rot), specs[k].sigma,
                                specs[k].lambda, k == 0 ? 0.0 : 100.0});
    }
    p.shift = p.components.front().center;
    return p;
}

}  // namespace

std::uint64_t BenchProblem::digest() const {
    Digest d;
    d.add(static_cast<std::uint64_t>(dimension));
    d.add(bias);
    d.add(static_cast<std::uint64_t>(base));
    d.add(shift);
    d.add(rotation);
    for (auto j : permutation) d.add(static_cast<std::uint64_t>(j));
    for (const auto& b : blocks) {
        d.add(static_cast<std::uint64_t>(b.base));
        d.add(b.rotation);
    }
    for (const auto& c : components) {
        d.add(static_cast<std::uint64_t>(c.base));
        d.add(c.center);
        d.add(c.rotation);
        d.add(c.sigma);
        d.add(c.lambda);
        d.add(c.offset);
    }
    return d.h;
}

std::vector<BenchProblem> make_suite(std::size_t dimension, std::uint64_t seed) {
    if (dimension < 2) throw std::invalid_argument("make_suite: dimension must be >= 2");
    using B = BaseFunction;
    using C = Category;
    const std::size_t d = dimension;
    std::uint64_t stream = 0;
    auto next_seed = [&] { return mix_seed(seed, stream++); };

    std::vector<BenchProblem> suite;
    suite.push_back(simple("f01-elliptic", C::unimodal, B::elliptic, true, d, next_seed()));
    suite.push_back(simple("f02-bent-cigar", C::unimodal, B::bent_cigar, true, d, next_seed()));
    suite.push_back(simple("f03-rosenbrock", C::multimodal, B::rosenbrock, true, d, next_seed()));
    suite.push_back(simple("f04-ackley", C::multimodal, B::ackley, true, d, next_seed()));
    suite.push_back(simple("f05-rastrigin", C::multimodal, B::rastrigin, true, d, next_seed()));
    suite.push_back(simple("f06-griewank", C::multimodal, B::griewank, true, d, next_seed()));
    suite.push_back(simple("f07-schwefel", C::multimodal, B::mod_schwefel, true, d, next_seed()));
    suite.push_back(
        simple("f08-rastrigin-unrotated", C::multimodal, B::rastrigin, false, d, next_seed()));
    suite.push_back(hybrid("f09-hybrid-schwefel-rastrigin-elliptic",
                           {B::mod_schwefel, B::rastrigin, B::elliptic}, d, next_seed()));
    suite.push_back(hybrid("f10-hybrid-griewank-discus-rosenbrock",
                           {B::griewank, B::discus, B::rosenbrock}, d, next_seed()));
    suite.push_back(composition("f11-composition-rosenbrock-elliptic-discus",
                                {{{B::rosenbrock, 10.0, 1.0},
                                  {B::elliptic, 20.0, 1e-6},
                                  {B::discus, 30.0, 1e-6}}},
                                d, next_seed()));
    suite.push_back(composition("f12-composition-schwefel-rastrigin-ackley",
                                {{{B::mod_schwefel, 20.0, 1.0},
                                  {B::rastrigin, 20.0, 1.0},
                                  {B::ackley, 20.0, 10.0}}},
                                d, next_seed()));
    for (std::size_t k = 0; k < suite.size(); ++k) suite[k].bias = 100.0 * static_cast<double>(k + 1);
    return suite;
}

nlohmann::json suite_manifest(const std::vector<BenchProblem>& suite, std::uint64_t seed) {
    nlohmann::json problems = nlohmann::json::array();
    for (const auto& p : suite) {
        nlohmann::json bases = nlohmann::json::array();
        if (p.category == Category::hybrid) {
            for (const auto& b : p.blocks) bases.push_back(to_string(b.base));
        } else if (p.category == Category::composition) {
            for (const auto& c : p.components) bases.push_back(to_string(c.base));
        } else {
            bases.push_back(to_string(p.base));
        }
        std::ostringstream digest;
        digest << std::hex << std::setw(16) << std::setfill('0') << p.digest();
        problems.push_back({{"id", p.id},
                            {"category", to_string(p.category)},
                            {"bias", p.bias},
                            {"seed", p.seed},
                            {"bases", bases},
                            {"digest", digest.str()}});
    }
    return {{"format", "mlcc-suite v1"},
            {"dimension", suite.empty() ? 0 : suite.front().dimension},
            {"seed", seed},
            {"domain", {kDomainLower, kDomainUpper}},
            {"problems", problems}};
}

}  // namespace mlcc::bench
