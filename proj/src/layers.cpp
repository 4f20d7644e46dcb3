#include "mlcc/layers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace mlcc {

namespace {

class Fnv1a {
public:
    void add(std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            hash_ ^= (v >> (8 * b)) & 0xffu;
            hash_ *= 0x100000001b3ull;
        }
    }
    void add(double v) { add(std::bit_cast<std::uint64_t>(v)); }
    void add(const std::vector<double>& v) {
        add(static_cast<std::uint64_t>(v.size()));
        for (double x : v) add(x);
    }
    std::uint64_t value() const noexcept { return hash_; }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ull;
};

void hash_archive(Fnv1a& h, const Archive& archive) {
    h.add(static_cast<std::uint64_t>(archive.size()));
    for (const auto& g : archive.members()) h.add(g);
}

std::size_t archive_capacity(double rate, std::size_t np) {
    return static_cast<std::size_t>(std::llround(rate * static_cast<double>(np)));
}

/// current-to-pbest/1/bin with bound repair; shared by the SHADE and BiD layers.
TrialProposal pbest_trial(std::size_t i, const GenerationView& view, const Archive& archive,
                          double f, double cr, double p_max, RandomSource& rng) {
    const double np = static_cast<double>(view.members.size());
    const double p_min = std::min(2.0 / np, p_max);
    const double p = rng.uniform(p_min, p_max);
    TrialProposal out;
    const auto& target = view.members[i].genome;
    const Genome mutant =
        mutate_current_to_pbest(i, view.members, view.order, archive, f, p, rng, &out.donors);
    out.trial = repair_bounds(crossover_binomial(target, mutant, cr, rng), target, *view.bounds);
    out.f = f;
    out.cr = cr;
    return out;
}

}  // namespace

OwnedView::OwnedView(const Population& population, const Bounds& bounds)
    : population(&population), order(fitness_order(population.members)), bounds(&bounds) {}

GenerationView OwnedView::view() const {
    return GenerationView{population->members, order, order.empty() ? 0 : order.front(), bounds};
}

double sample_scale_factor(double location, double scale, RandomSource& rng) {
    double f;
    do {
        f = rng.cauchy(location, scale);
    } while (f <= 0.0);
    return std::min(f, 1.0);
}

double sample_crossover_rate_normal(double mean, double stddev, RandomSource& rng) {
    return std::clamp(rng.normal(mean, stddev), 0.0, 1.0);
}

// ---------------------------------------------------------------- SHADE

void ShadeLayer::initialize(std::size_t np, std::size_t, RandomSource& rng) {
    np_ = np;
    const std::size_t h = params_.history == 0 ? np : params_.history;
    memory_f_.assign(h, params_.mf_init);
    memory_cr_.assign(h, params_.mcr_init);
    write_index_ = 0;
    archive_ = Archive(0);
    archive_.set_capacity(archive_capacity(params_.archive_rate, np), rng);
    success_f_.clear();
    success_cr_.clear();
    success_delta_.clear();
}

TrialProposal ShadeLayer::propose(std::size_t i, const GenerationView& view,
                                  RandomSource& rng) const {
    const std::size_t r = rng.index(memory_f_.size());
    const double cr = sample_crossover_rate_normal(memory_cr_[r], 0.1, rng);
    const double f = sample_scale_factor(memory_f_[r], 0.1, rng);
    return pbest_trial(i, view, archive_, f, cr, params_.p_max, rng);
}

void ShadeLayer::feedback(std::size_t, const TrialProposal& proposal, const Individual& target,
                          double trial_fitness, RandomSource& rng) {
    if (!(trial_fitness < target.fitness)) return;
    success_f_.push_back(proposal.f);
    success_cr_.push_back(proposal.cr);
    success_delta_.push_back(target.fitness - trial_fitness);
    archive_.insert(target.genome, rng);
}

void ShadeLayer::end_generation() {
    if (!success_f_.empty()) {
        double total = 0.0;
        for (double d : success_delta_) total += d;
        double sum_wf = 0.0, sum_wf2 = 0.0, sum_wcr = 0.0;
        for (std::size_t k = 0; k < success_f_.size(); ++k) {
            const double w = success_delta_[k] / total;
            sum_wf += w * success_f_[k];
            sum_wf2 += w * success_f_[k] * success_f_[k];
            sum_wcr += w * success_cr_[k];
        }
        memory_f_[write_index_] = sum_wf2 / sum_wf;
        memory_cr_[write_index_] = sum_wcr;
        write_index_ = (write_index_ + 1) % memory_f_.size();
    }
    success_f_.clear();
    success_cr_.clear();
    success_delta_.clear();
}

std::uint64_t ShadeLayer::state_hash() const {
    Fnv1a h;
    h.add(memory_f_);
    h.add(memory_cr_);
    h.add(static_cast<std::uint64_t>(write_index_));
    h.add(success_f_);
    h.add(success_cr_);
    h.add(success_delta_);
    hash_archive(h, archive_);
    return h.value();
}

void ShadeLayer::pin_memories(double mf, double mcr) {
    std::fill(memory_f_.begin(), memory_f_.end(), mf);
    std::fill(memory_cr_.begin(), memory_cr_.end(), mcr);
}

// ---------------------------------------------------------------- BiD

ControlParams BideLayer::resample(RandomSource& rng) const {
    const double f_mode = rng.uniform() < 0.5 ? params_.f_mode_low : params_.f_mode_high;
    const double f = sample_scale_factor(f_mode, params_.scale, rng);
    const double cr_mode = rng.uniform() < 0.5 ? params_.cr_mode_low : params_.cr_mode_high;
    const double cr = std::clamp(rng.cauchy(cr_mode, params_.scale), 0.0, 1.0);
    return {f, cr};
}

void BideLayer::initialize(std::size_t np, std::size_t, RandomSource& rng) {
    memory_.clear();
    memory_.reserve(np);
    for (std::size_t i = 0; i < np; ++i) memory_.push_back(resample(rng));
    archive_ = Archive(0);
    archive_.set_capacity(archive_capacity(params_.archive_rate, np), rng);
}

TrialProposal BideLayer::propose(std::size_t i, const GenerationView& view,
                                 RandomSource& rng) const {
    const auto [f, cr] = memory_.at(i);
    return pbest_trial(i, view, archive_, f, cr, params_.p_max, rng);
}

void BideLayer::feedback(std::size_t i, const TrialProposal&, const Individual& target,
                         double trial_fitness, RandomSource& rng) {
    if (trial_fitness < target.fitness) {
        archive_.insert(target.genome, rng);
    } else {
        memory_.at(i) = resample(rng);
    }
}

std::uint64_t BideLayer::state_hash() const {
    Fnv1a h;
    h.add(static_cast<std::uint64_t>(memory_.size()));
    for (const auto& m : memory_) {
        h.add(m.f);
        h.add(m.cr);
    }
    hash_archive(h, archive_);
    return h.value();
}

// ---------------------------------------------------------------- fixed DE

TrialProposal FixedDeLayer::propose(std::size_t i, const GenerationView& view,
                                    RandomSource& rng) const {
    TrialProposal out;
    const auto& target = view.members[i].genome;
    const Genome mutant =
        mutate_classic(params_.strategy, i, view.members, view.best_index, params_.f, rng);
    out.trial =
        repair_bounds(crossover_binomial(target, mutant, params_.cr, rng), target, *view.bounds);
    out.f = params_.f;
    out.cr = params_.cr;
    return out;
}

std::uint64_t FixedDeLayer::state_hash() const {
    Fnv1a h;
    h.add(params_.f);
    h.add(params_.cr);
    h.add(static_cast<std::uint64_t>(params_.strategy));
    return h.value();
}

// ---------------------------------------------------------------- factory

std::unique_ptr<Layer> make_layer(const LayerSpec& spec) {
    return std::visit(
        [](const auto& p) -> std::unique_ptr<Layer> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ShadeParams>) {
                return std::make_unique<ShadeLayer>(p);
            } else if constexpr (std::is_same_v<T, BideParams>) {
                return std::make_unique<BideLayer>(p);
            } else {
                return std::make_unique<FixedDeLayer>(p);
            }
        },
        spec);
}

std::string layer_name(const LayerSpec& spec) {
    return std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ShadeParams>) {
                return "shade";
            } else if constexpr (std::is_same_v<T, BideParams>) {
                return "bide";
            } else {
                return "de-" + std::string(to_string(p.strategy));
            }
        },
        spec);
}

}  // namespace mlcc
