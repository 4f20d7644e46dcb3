#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mlcc/layers.hpp"

using namespace mlcc;

namespace {

Population random_population(std::size_t np, std::size_t dim, RandomSource& rng) {
    Population pop;
    for (std::size_t i = 0; i < np; ++i) {
        Genome g(dim);
        for (auto& v : g) v = rng.uniform(-100.0, 100.0);
        double f = 0.0;
        for (double v : g) f += v * v;
        pop.members.push_back({g, f});
    }
    return pop;
}

TrialProposal proposal_with(double f, double cr) {
    TrialProposal p;
    p.trial = {0.0};
    p.f = f;
    p.cr = cr;
    return p;
}

/// Independent evaluation of the weighted Lehmer and arithmetic means.
std::pair<double, double> memory_oracle(const std::vector<double>& sf,
                                        const std::vector<double>& scr,
                                        const std::vector<double>& delta) {
    double num = 0.0, den = 0.0, cr = 0.0, total = 0.0;
    for (std::size_t k = 0; k < sf.size(); ++k) {
        num += delta[k] * sf[k] * sf[k];
        den += delta[k] * sf[k];
        cr += delta[k] * scr[k];
        total += delta[k];
    }
    return {num / den, cr / total};
}

double cauchy_cdf(double x, double loc, double scale) {
    return 0.5 + std::atan((x - loc) / scale) / std::numbers::pi;
}

}  // namespace

TEST_CASE("SHADE starts from the configured memories") {
    RandomSource rng(1);
    ShadeLayer layer;
    layer.initialize(50, 10, rng);
    CHECK(layer.memory_f().size() == 50);
    CHECK(std::all_of(layer.memory_f().begin(), layer.memory_f().end(),
                      [](double v) { return v == 0.7; }));
    CHECK(std::all_of(layer.memory_cr().begin(), layer.memory_cr().end(),
                      [](double v) { return v == 0.5; }));
    CHECK(layer.archive().capacity() == 50);
}

TEST_CASE("SHADE proposals centre on the initial memories") {
    RandomSource rng(2);
    const auto pop = random_population(50, 10, rng);
    const auto bounds = Bounds::uniform(10, -100.0, 100.0);
    const OwnedView owned(pop, bounds);
    ShadeLayer layer;
    layer.initialize(50, 10, rng);
    std::vector<double> fs, crs;
    for (int t = 0; t < 20000; ++t) {
        const auto p = layer.propose(t % 50, owned.view(), rng);
        REQUIRE(p.f > 0.0);
        REQUIRE(p.f <= 1.0);
        REQUIRE(p.cr >= 0.0);
        REQUIRE(p.cr <= 1.0);
        CHECK(bounds.contains(p.trial));
        fs.push_back(p.f);
        crs.push_back(p.cr);
    }
    std::nth_element(fs.begin(), fs.begin() + fs.size() / 2, fs.end());
    CHECK(fs[fs.size() / 2] == doctest::Approx(0.7).epsilon(0.02));
    double m = 0.0;
    for (double c : crs) m += c;
    CHECK(m / crs.size() == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("parameter samplers redraw and clip") {
    RandomSource rng(3);
    for (int t = 0; t < 20000; ++t) {
        const double f = sample_scale_factor(0.05, 0.1, rng);
        CHECK(f > 0.0);
        CHECK(f <= 1.0);
    }
    CHECK(sample_crossover_rate_normal(1.3, 0.0, rng) == 1.0);
    CHECK(sample_crossover_rate_normal(-0.4, 0.0, rng) == 0.0);
}

TEST_CASE("SHADE feedback records strict improvements only") {
    RandomSource rng(4);
    ShadeLayer layer;
    layer.initialize(5, 1, rng);
    const Individual target{{1.0}, 4.0};
    layer.feedback(0, proposal_with(0.5, 0.2), target, 4.0, rng);
    CHECK(layer.success_f().empty());
    CHECK(layer.archive().empty());
    layer.feedback(0, proposal_with(0.5, 0.2), target, 3.0, rng);
    CHECK(layer.success_f().size() == 1);
    CHECK(layer.success_cr().size() == 1);
    CHECK(layer.success_delta() == std::vector<double>{1.0});
    CHECK(layer.archive().size() == 1);
    for (int k = 0; k < 10; ++k) layer.feedback(0, proposal_with(0.5, 0.2), target, 1.0, rng);
    CHECK(layer.archive().size() == 5);
}

TEST_CASE("SHADE memory update worked example") {
    RandomSource rng(5);
    ShadeLayer layer;
    layer.initialize(5, 1, rng);
    layer.feedback(0, proposal_with(0.5, 0.2), {{0.0}, 4.0}, 3.0, rng);
    layer.feedback(1, proposal_with(0.7, 0.4), {{0.0}, 4.0}, 1.0, rng);
    layer.end_generation();
    CHECK(layer.memory_f()[0] == doctest::Approx(0.6615384615384615).epsilon(1e-12));
    CHECK(layer.memory_cr()[0] == doctest::Approx(0.35).epsilon(1e-12));
    CHECK(layer.write_index() == 1);
    CHECK(layer.memory_f()[1] == 0.7);
    CHECK(layer.success_f().empty());
}

TEST_CASE("SHADE memory update edge cases") {
    RandomSource rng(6);
    ShadeLayer layer;
    layer.initialize(5, 1, rng);
    const auto before = layer.state_hash();
    layer.end_generation();
    CHECK(layer.state_hash() == before);
    CHECK(layer.write_index() == 0);

    layer.feedback(0, proposal_with(0.9, 0.3), {{0.0}, 10.0}, 5.0, rng);
    layer.end_generation();
    CHECK(layer.memory_f()[0] == doctest::Approx(0.9).epsilon(1e-14));
    CHECK(layer.memory_cr()[0] == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("SHADE memory matches the weighted-mean oracle on random success sets") {
    RandomSource rng(7);
    for (int t = 0; t < 100; ++t) {
        ShadeLayer layer;
        layer.initialize(10, 1, rng);
        const std::size_t n = 1 + rng.index(12);
        std::vector<double> sf, scr, delta;
        for (std::size_t k = 0; k < n; ++k) {
            sf.push_back(rng.uniform());
            scr.push_back(rng.uniform());
            delta.push_back(std::exp(rng.uniform(-5.0, 5.0)));
            layer.feedback(k % 10, proposal_with(sf.back(), scr.back()), {{0.0}, delta.back()},
                           0.0, rng);
        }
        layer.end_generation();
        const auto [mf, mcr] = memory_oracle(sf, scr, delta);
        CHECK(std::abs(layer.memory_f()[0] - mf) <= 1e-12 * std::abs(mf));
        CHECK(std::abs(layer.memory_cr()[0] - mcr) <= 1e-12 * std::abs(mcr));
    }
}

TEST_CASE("SHADE memories stay in range under random feedback") {
    RandomSource rng(8);
    const auto pop = random_population(20, 3, rng);
    const auto bounds = Bounds::uniform(3, -100.0, 100.0);
    const OwnedView owned(pop, bounds);
    ShadeLayer layer;
    layer.initialize(20, 3, rng);
    for (int g = 0; g < 300; ++g) {
        for (std::size_t i = 0; i < 20; ++i) {
            const auto p = layer.propose(i, owned.view(), rng);
            layer.feedback(i, p, pop.members[i], pop.members[i].fitness * rng.uniform(0.5, 1.5),
                           rng);
        }
        layer.end_generation();
        CHECK(layer.archive().size() <= 20);
    }
    for (std::size_t k = 0; k < 20; ++k) {
        CHECK(layer.memory_f()[k] > 0.0);
        CHECK(layer.memory_f()[k] <= 1.0);
        CHECK(layer.memory_cr()[k] >= 0.0);
        CHECK(layer.memory_cr()[k] <= 1.0);
    }
}

TEST_CASE("BiD proposals pass their stored parameters through") {
    RandomSource rng(9);
    const auto pop = random_population(10, 4, rng);
    const auto bounds = Bounds::uniform(4, -100.0, 100.0);
    const OwnedView owned(pop, bounds);
    BideLayer layer;
    layer.initialize(10, 4, rng);
    layer.memory()[3] = {0.65, 0.1};
    const auto p = layer.propose(3, owned.view(), rng);
    CHECK(p.f == 0.65);
    CHECK(p.cr == 0.1);
    CHECK(bounds.contains(p.trial));

    RandomSource a(1), b(1);
    CHECK(layer.propose(2, owned.view(), a).trial == layer.propose(2, owned.view(), b).trial);
}

TEST_CASE("BiD keeps parameters on success and resamples on failure") {
    RandomSource rng(10);
    BideLayer layer;
    layer.initialize(4, 1, rng);
    layer.memory()[1] = {0.5, 0.5};
    const Individual target{{0.0}, 2.0};
    layer.feedback(1, proposal_with(0.5, 0.5), target, 1.0, rng);
    CHECK(layer.memory()[1].f == 0.5);
    CHECK(layer.memory()[1].cr == 0.5);
    CHECK(layer.archive().size() == 1);

    int changed = 0;
    for (int t = 0; t < 200; ++t) {
        const auto before = layer.memory()[1];
        layer.feedback(1, proposal_with(before.f, before.cr), target, 2.0, rng);
        const auto after = layer.memory()[1];
        CHECK(after.f > 0.0);
        CHECK(after.f <= 1.0);
        CHECK(after.cr >= 0.0);
        CHECK(after.cr <= 1.0);
        changed += after.f != before.f;
    }
    CHECK(changed > 150);
    CHECK(layer.archive().size() == 1);
}

TEST_CASE("BiD scale factors follow the truncated bimodal Cauchy mixture") {
    // Analytic oracle: each mode is a Cauchy conditioned on F > 0 with the
    // mass above 1 collapsed onto 1; the two modes are equally likely.
    const BideParams params;
    auto mixture_mass = [&](double lo, double hi) {
        double total = 0.0;
        for (double loc : {params.f_mode_low, params.f_mode_high}) {
            const double keep = 1.0 - cauchy_cdf(0.0, loc, params.scale);
            total += 0.5 * (cauchy_cdf(hi, loc, params.scale) - cauchy_cdf(lo, loc, params.scale)) /
                     keep;
        }
        return total;
    };
    auto mass_at_one = [&] {
        double total = 0.0;
        for (double loc : {params.f_mode_low, params.f_mode_high}) {
            const double keep = 1.0 - cauchy_cdf(0.0, loc, params.scale);
            total += 0.5 * (1.0 - cauchy_cdf(1.0, loc, params.scale)) / keep;
        }
        return total;
    };

    BideLayer layer(params);
    RandomSource rng(11);
    constexpr int draws = 100000;
    constexpr int bins = 20;
    std::vector<int> hist(bins, 0);
    int ones = 0;
    for (int t = 0; t < draws; ++t) {
        const double f = layer.resample(rng).f;
        if (f == 1.0) {
            ++ones;
            continue;
        }
        ++hist[std::min(bins - 1, static_cast<int>(f * bins))];
    }
    for (int k = 0; k < bins; ++k) {
        const double q = mixture_mass(double(k) / bins, double(k + 1) / bins);
        const double expect = draws * q;
        CHECK(std::abs(hist[k] - expect) < 5 * std::sqrt(expect * (1 - q)) + 3);
    }
    const double q1 = mass_at_one();
    CHECK(std::abs(ones - draws * q1) < 5 * std::sqrt(draws * q1 * (1 - q1)));

    // Two modes: the bin holding 0.65 is a local maximum above the trough near 0.82.
    const int at_low_mode = hist[13];
    CHECK(at_low_mode > hist[11]);
    CHECK(at_low_mode > hist[15]);
    CHECK(at_low_mode > 1.5 * hist[16]);
    CHECK(ones > at_low_mode);
}

TEST_CASE("BiD parameters persist for individuals that keep succeeding") {
    RandomSource rng(12);
    BideLayer layer;
    layer.initialize(6, 2, rng);
    const auto kept = layer.memory()[2];
    for (int g = 0; g < 50; ++g) {
        layer.feedback(2, proposal_with(kept.f, kept.cr), {{0.0, 0.0}, 10.0}, 1.0, rng);
        layer.end_generation();
    }
    CHECK(layer.memory()[2].f == kept.f);
    CHECK(layer.memory()[2].cr == kept.cr);
    CHECK(layer.archive().size() == 6);
}

TEST_CASE("fixed DE with CR = 1 yields the repaired mutant") {
    RandomSource seed(13);
    const auto pop = random_population(8, 2, seed);
    const auto bounds = Bounds::uniform(2, -100.0, 100.0);
    const OwnedView owned(pop, bounds);
    FixedDeLayer layer({0.9, 1.0, MutationStrategy::rand1});
    for (std::uint64_t s = 0; s < 50; ++s) {
        RandomSource a(s), b(s);
        const auto p = layer.propose(4, owned.view(), a);
        const auto mutant =
            mutate_classic(MutationStrategy::rand1, 4, pop.members, owned.view().best_index, 0.9, b);
        CHECK(p.trial == repair_bounds(mutant, pop.members[4].genome, bounds));
    }
    const auto h = layer.state_hash();
    RandomSource rng(1);
    layer.feedback(0, proposal_with(0.9, 1.0), pop.members[0], -1.0, rng);
    layer.end_generation();
    CHECK(layer.state_hash() == h);
}

TEST_CASE("feedback to one layer leaves the others untouched") {
    RandomSource rng(14);
    const auto pop = random_population(10, 3, rng);
    const auto bounds = Bounds::uniform(3, -100.0, 100.0);
    const OwnedView owned(pop, bounds);
    std::vector<std::unique_ptr<Layer>> layers;
    layers.push_back(make_layer(ShadeParams{}));
    layers.push_back(make_layer(BideParams{}));
    layers.push_back(make_layer(FixedDeParams{}));
    for (auto& l : layers) l->initialize(10, 3, rng);
    for (int t = 0; t < 500; ++t) {
        const std::size_t a = rng.index(3);
        std::vector<std::uint64_t> before;
        for (const auto& l : layers) before.push_back(l->state_hash());
        const std::size_t i = rng.index(10);
        const auto p = layers[a]->propose(i, owned.view(), rng);
        layers[a]->feedback(i, p, pop.members[i], pop.members[i].fitness * rng.uniform(0.0, 2.0),
                            rng);
        for (std::size_t k = 0; k < 3; ++k) {
            if (k != a) CHECK(layers[k]->state_hash() == before[k]);
        }
    }
}

TEST_CASE("layer factory names") {
    CHECK(layer_name(ShadeParams{}) == "shade");
    CHECK(layer_name(BideParams{}) == "bide");
    CHECK(layer_name(FixedDeParams{}) == "de-rand/1");
    CHECK(make_layer(BideParams{})->name() == "bide");
}
