#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mlcc/core.hpp"
#include "mlcc/layers.hpp"
#include "mlcc/stats.hpp"

namespace mlcc {

/// Which of the framework's mechanisms are active.
enum class Ablation {
    full,             ///< preference-based layer selection + multi-layer top individuals
    no_rab,           ///< Variant-I: every individual takes one trial from its preferred layer
    no_ipls,          ///< Variant-II: top individuals use all layers, the rest a random one
    neither,          ///< Variant-III: every individual uses one random layer
    no_fitness_bias,  ///< Variant-IV: the multi-layer individuals are drawn at random
};

std::string_view to_string(Ablation a) noexcept;

/// How survivors are written back during a generation.
enum class UpdateMode {
    immediate,    ///< survivors replace members at once; later trials see them
    synchronous,  ///< trials read the generation-start population
};

struct MlccConfig {
    std::size_t population_size = 50;
    /// Fraction of the population eligible for multi-layer evolution.
    double n = 0.05;
    std::vector<LayerSpec> layers;
    Ablation ablation = Ablation::full;
    /// Constant top_G instead of the per-generation draw.
    std::optional<std::size_t> top_g_override;
    UpdateMode update = UpdateMode::immediate;
    /// Generations per layer-share interval.
    std::size_t share_interval = 50;

    std::size_t layer_count() const noexcept { return layers.size(); }
    /// Throws std::invalid_argument on an inconsistent configuration.
    void validate() const;
};

/// 1-based fitness ranks: rank 1 is the smallest fitness, ties go to the
/// lower index.
using FitnessRanks = std::vector<std::size_t>;

FitnessRanks fitness_ranks(std::span<const Individual> members);

/// ceil(u * NP * N) for a uniform u in (0, 1), kept within [1, NP].
std::size_t top_g_from_uniform(double u, std::size_t np, double n);
std::size_t draw_top_g(RandomSource& rng, std::size_t np, double n);

/// One preferred layer (0-based) per individual.
class PreferenceTable {
public:
    PreferenceTable() = default;
    PreferenceTable(std::size_t np, std::size_t layers, RandomSource& rng);
    PreferenceTable(std::vector<std::size_t> entries, std::size_t layers);

    std::size_t operator[](std::size_t i) const { return entries_.at(i); }
    std::size_t& operator[](std::size_t i) { return entries_.at(i); }
    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t layers() const noexcept { return layers_; }
    const std::vector<std::size_t>& entries() const noexcept { return entries_; }

private:
    std::vector<std::size_t> entries_;
    std::size_t layers_ = 0;
};

/// The individual was processed with a single trial from its preferred layer.
struct InferiorPath {};
/// The individual was processed by every layer; `best_layer` produced the fittest trial.
struct TopPath {
    std::size_t best_layer;
};
using IplsContext = std::variant<InferiorPath, TopPath>;

/// Preference dynamics. Inferior success keeps the preference, inferior
/// failure moves to a uniformly drawn different layer, top success adopts the
/// winning layer, top failure keeps the preference.
void ipls_update(PreferenceTable& table, std::size_t i, bool succeeded, const IplsContext& context,
                 RandomSource& rng);

/// Charges evaluations and tracks the run's best-so-far fitness. Every strict
/// improvement made by a trial is a new best solution whose producer's rank is
/// archived.
class Evaluator {
public:
    Evaluator(const Problem& problem, Budget& budget, std::size_t population_size);

    const Problem& problem() const noexcept { return *problem_; }
    Budget& budget() noexcept { return *budget_; }
    bool can_evaluate() const noexcept { return !budget_->exhausted(); }

    /// Evaluation of an initial member; never counts as a new best solution.
    double initial(std::span<const double> genome);
    /// Evaluation of a trial produced for the target ranked `producer_rank`.
    double trial(std::span<const double> genome, std::size_t producer_rank);

    double best_fitness() const noexcept { return best_; }
    const stats::RankArchive& rank_archive() const noexcept { return archive_; }
    std::uint64_t nbs_events() const noexcept { return archive_.size(); }

private:
    const Problem* problem_;
    Budget* budget_;
    double best_ = std::numeric_limits<double>::infinity();
    stats::RankArchive archive_;
};

struct RabOutcome {
    Individual survivor;
    /// Layer with the fittest evaluated trial (ties go to the lower index).
    std::size_t best_layer = 0;
    bool succeeded = false;
    /// Trials actually evaluated; fewer than the layer count means the budget ran out.
    std::size_t evaluated = 0;
};

/// Every layer proposes a trial for target `i` against the same view. Each
/// evaluated trial is fed back to its own layer; the fittest one then competes
/// with the target.
RabOutcome rab_evolve_top(std::size_t i, std::span<const std::unique_ptr<Layer>> layers,
                          const GenerationView& view, const Individual& target,
                          std::size_t producer_rank, Evaluator& evaluator, RandomSource& rng);

struct InferiorOutcome {
    Individual survivor;
    bool succeeded = false;
};

/// One trial from `layer`, fed back to that layer, then one-to-one survival.
/// Throws BudgetExhausted when no evaluation is left.
InferiorOutcome evolve_inferior(std::size_t i, std::size_t layer,
                                std::span<const std::unique_ptr<Layer>> layers,
                                const GenerationView& view, const Individual& target,
                                std::size_t producer_rank, Evaluator& evaluator, RandomSource& rng);

struct GenerationStats {
    std::size_t top_g = 0;
    std::uint64_t evaluations = 0;
    /// Trials proposed by each layer this generation.
    std::vector<std::uint64_t> layer_trials;
    /// Individuals that took the multi-layer path, in index order.
    std::vector<std::size_t> top_individuals;
};

struct LayerShareInterval {
    std::size_t first_generation = 0;
    std::size_t generations = 0;
    /// Fraction of this interval's trials produced by each layer.
    std::vector<double> shares;
    /// Per tracked individual, the fraction of its trials from each layer.
    std::vector<std::vector<double>> tracked;
};

struct RunRecord {
    std::string problem_id;
    std::uint64_t seed = 0;
    std::size_t population_size = 0;
    std::vector<std::string> layer_names;
    double best_fitness = 0.0;
    double final_error = 0.0;
    std::uint64_t evaluations = 0;
    std::size_t generations = 0;
    /// Best-so-far error after initialization and after every generation.
    std::vector<double> error_trace;
    /// top_G and evaluation count of every completed generation.
    std::vector<std::size_t> top_g_trace;
    std::vector<std::uint64_t> evaluation_trace;
    std::vector<LayerShareInterval> layer_shares;
    /// Population indices whose per-layer shares are tracked.
    std::vector<std::size_t> tracked_individuals;
    stats::RankArchive rank_archive;
};

/// Generation loop shared by the framework and single-layer baselines. A
/// single layer (with multi-layer evolution disabled) is plain DE with that
/// layer's operators.
class Engine {
public:
    Engine(MlccConfig config, const Problem& problem, Budget& budget, std::uint64_t seed);

    /// Samples and evaluates the initial population, draws preferences and
    /// initializes the layers.
    void initialize();
    /// One generation. Throws BudgetExhausted when the budget runs out; members
    /// not yet processed keep their current state.
    GenerationStats step();
    /// initialize() then step() until the budget is spent.
    RunRecord run();

    const Population& population() const noexcept { return population_; }
    const PreferenceTable& preferences() const noexcept { return preferences_; }
    std::span<const std::unique_ptr<Layer>> layers() const noexcept { return layers_; }
    const Evaluator& evaluator() const noexcept { return evaluator_; }
    const MlccConfig& config() const noexcept { return config_; }
    RandomSource& rng() noexcept { return rng_; }

private:
    bool multi_layer_enabled() const noexcept;
    bool preferences_tracked() const noexcept;
    void note_trial(std::size_t i, std::size_t layer);
    void close_share_interval();

    MlccConfig config_;
    const Problem* problem_;
    Budget* budget_;
    RandomSource rng_;
    Evaluator evaluator_;
    std::vector<std::unique_ptr<Layer>> layers_;
    Population population_;
    PreferenceTable preferences_;

    GenerationStats current_;
    std::vector<std::uint64_t> interval_trials_;
    std::vector<std::vector<std::uint64_t>> interval_tracked_;
    std::size_t interval_start_ = 0;
    RunRecord record_;
};

/// A full framework run: validates that at least two layers are configured.
RunRecord mlcc_run(const MlccConfig& config, const Problem& problem, Budget budget,
                   std::uint64_t seed);

/// A single layer run standalone as a classic DE loop.
RunRecord single_layer_run(const LayerSpec& layer, std::size_t population_size,
                           const Problem& problem, Budget budget, std::uint64_t seed);

}  // namespace mlcc
