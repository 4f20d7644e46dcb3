#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mlcc/core.hpp"
#include "mlcc/de_ops.hpp"

namespace mlcc {

/// What a layer sees when proposing: the population it mutates from plus the
/// ranking taken at the start of the generation.
struct GenerationView {
    std::span<const Individual> members;
    /// Member indices from best to worst at generation start.
    std::span<const std::size_t> order;
    /// Best member at generation start; fixed for the whole generation.
    std::size_t best_index = 0;
    const Bounds* bounds = nullptr;
};

/// Builds a view over a whole population, ranking it on the spot.
struct OwnedView {
    explicit OwnedView(const Population& population, const Bounds& bounds);
    GenerationView view() const;

    const Population* population;
    std::vector<std::size_t> order;
    const Bounds* bounds;
};

struct TrialProposal {
    Genome trial;
    std::size_t layer = 0;
    double f = 0.0;
    double cr = 0.0;
    /// Donor indices used by the mutation (strategy dependent).
    std::vector<std::size_t> donors;
};

/// A layer optimizer. propose() only reads; feedback() and end_generation()
/// are the sole mutators and only touch the layer's own state.
class Layer {
public:
    virtual ~Layer() = default;

    virtual std::string_view name() const noexcept = 0;
    /// Resets the layer for a run over `np` individuals.
    virtual void initialize(std::size_t np, std::size_t dimension, RandomSource& rng) = 0;
    virtual TrialProposal propose(std::size_t i, const GenerationView& view,
                                  RandomSource& rng) const = 0;
    virtual void feedback(std::size_t i, const TrialProposal& proposal, const Individual& target,
                          double trial_fitness, RandomSource& rng) = 0;
    virtual void end_generation() = 0;
    /// Digest of the adaptive state, for isolation checks.
    virtual std::uint64_t state_hash() const = 0;
};

struct ShadeParams {
    double mf_init = 0.7;
    double mcr_init = 0.5;
    /// Memory length; 0 means NP.
    std::size_t history = 0;
    double p_max = 0.2;
    /// Archive capacity as a multiple of NP; 0 disables the archive.
    double archive_rate = 1.0;
};

struct BideParams {
    double f_mode_low = 0.65;
    double f_mode_high = 1.0;
    double cr_mode_low = 0.1;
    double cr_mode_high = 0.95;
    double scale = 0.1;
    double p_max = 0.2;
    double archive_rate = 1.0;
};

struct FixedDeParams {
    double f = 0.7;
    double cr = 0.5;
    MutationStrategy strategy = MutationStrategy::rand1;
};

using LayerSpec = std::variant<ShadeParams, BideParams, FixedDeParams>;

std::unique_ptr<Layer> make_layer(const LayerSpec& spec);
std::string layer_name(const LayerSpec& spec);

/// Cauchy draw redrawn while non-positive, then truncated to 1.
double sample_scale_factor(double location, double scale, RandomSource& rng);
/// Normal draw clipped to [0, 1].
double sample_crossover_rate_normal(double mean, double stddev, RandomSource& rng);

/// Success-history adaptation: ring-buffer memories of F and CR, updated from
/// the improvement-weighted means of the generation's successful values.
class ShadeLayer final : public Layer {
public:
    explicit ShadeLayer(ShadeParams params = {}) : params_(params) {}

    std::string_view name() const noexcept override { return "shade"; }
    void initialize(std::size_t np, std::size_t dimension, RandomSource& rng) override;
    TrialProposal propose(std::size_t i, const GenerationView& view,
                          RandomSource& rng) const override;
    void feedback(std::size_t i, const TrialProposal& proposal, const Individual& target,
                  double trial_fitness, RandomSource& rng) override;
    void end_generation() override;
    std::uint64_t state_hash() const override;

    const std::vector<double>& memory_f() const noexcept { return memory_f_; }
    const std::vector<double>& memory_cr() const noexcept { return memory_cr_; }
    std::size_t write_index() const noexcept { return write_index_; }
    const std::vector<double>& success_f() const noexcept { return success_f_; }
    const std::vector<double>& success_cr() const noexcept { return success_cr_; }
    const std::vector<double>& success_delta() const noexcept { return success_delta_; }
    const Archive& archive() const noexcept { return archive_; }

    /// Pins every memory slot, e.g. to freeze adaptation in experiments.
    void pin_memories(double mf, double mcr);

private:
    ShadeParams params_;
    std::size_t np_ = 0;
    std::vector<double> memory_f_;
    std::vector<double> memory_cr_;
    std::size_t write_index_ = 0;
    Archive archive_;
    std::vector<double> success_f_;
    std::vector<double> success_cr_;
    std::vector<double> success_delta_;
};

struct ControlParams {
    double f;
    double cr;
};

/// Bimodal self-adaptive parameters: each individual owns (F, CR), kept while
/// its trials keep improving and resampled from a two-mode Cauchy mixture
/// after a failure. Mutation is the same current-to-pbest/1/bin engine as
/// ShadeLayer.
class BideLayer final : public Layer {
public:
    explicit BideLayer(BideParams params = {}) : params_(params) {}

    std::string_view name() const noexcept override { return "bide"; }
    void initialize(std::size_t np, std::size_t dimension, RandomSource& rng) override;
    TrialProposal propose(std::size_t i, const GenerationView& view,
                          RandomSource& rng) const override;
    void feedback(std::size_t i, const TrialProposal& proposal, const Individual& target,
                  double trial_fitness, RandomSource& rng) override;
    void end_generation() override {}
    std::uint64_t state_hash() const override;

    ControlParams resample(RandomSource& rng) const;

    const std::vector<ControlParams>& memory() const noexcept { return memory_; }
    std::vector<ControlParams>& memory() noexcept { return memory_; }
    const Archive& archive() const noexcept { return archive_; }

private:
    BideParams params_;
    std::vector<ControlParams> memory_;
    Archive archive_;
};

/// Classic DE with constant F, CR and strategy; no adaptation.
class FixedDeLayer final : public Layer {
public:
    explicit FixedDeLayer(FixedDeParams params = {}) : params_(params) {}

    std::string_view name() const noexcept override { return "fixed-de"; }
    void initialize(std::size_t, std::size_t, RandomSource&) override {}
    TrialProposal propose(std::size_t i, const GenerationView& view,
                          RandomSource& rng) const override;
    void feedback(std::size_t, const TrialProposal&, const Individual&, double,
                  RandomSource&) override {}
    void end_generation() override {}
    std::uint64_t state_hash() const override;

    const FixedDeParams& params() const noexcept { return params_; }

private:
    FixedDeParams params_;
};

}  // namespace mlcc
