#include "mlcc/framework.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mlcc/de_ops.hpp"

namespace mlcc {

std::string_view to_string(Ablation a) noexcept {
    switch (a) {
        case Ablation::full: return "full";
        case Ablation::no_rab: return "no_rab";
        case Ablation::no_ipls: return "no_ipls";
        case Ablation::neither: return "neither";
        case Ablation::no_fitness_bias: return "no_fitness_bias";
    }
    return "?";
}

namespace {

void validate_common(const MlccConfig& c) {
    if (c.layers.empty()) throw std::invalid_argument("at least one layer is required");
    if (c.population_size < kMinPopulation) {
        throw std::invalid_argument("population size must be at least " +
                                    std::to_string(kMinPopulation));
    }
    if (!(c.n > 0.0 && c.n <= 1.0)) throw std::invalid_argument("N must lie in (0, 1]");
    if (c.top_g_override && (*c.top_g_override == 0 || *c.top_g_override > c.population_size)) {
        throw std::invalid_argument("top_G override must lie in [1, NP]");
    }
    if (c.share_interval == 0) throw std::invalid_argument("share interval must be positive");
}

}  // namespace

void MlccConfig::validate() const {
    validate_common(*this);
    if (layers.size() < 2) throw std::invalid_argument("the framework needs M >= 2 layers");
}

FitnessRanks fitness_ranks(std::span<const Individual> members) {
    const auto order = fitness_order(members);
    FitnessRanks ranks(members.size());
    for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = r + 1;
    return ranks;
}

std::size_t top_g_from_uniform(double u, std::size_t np, double n) {
    const double raw = std::ceil(u * static_cast<double>(np) * n);
    return std::clamp<std::size_t>(static_cast<std::size_t>(raw), 1, np);
}

std::size_t draw_top_g(RandomSource& rng, std::size_t np, double n) {
    return top_g_from_uniform(rng.uniform(), np, n);
}

PreferenceTable::PreferenceTable(std::size_t np, std::size_t layers, RandomSource& rng)
    : entries_(np), layers_(layers) {
    if (layers == 0) throw std::invalid_argument("PreferenceTable: no layers");
    for (auto& e : entries_) e = rng.index(layers);
}

PreferenceTable::PreferenceTable(std::vector<std::size_t> entries, std::size_t layers)
    : entries_(std::move(entries)), layers_(layers) {
    for (auto e : entries_) {
        if (e >= layers_) throw std::out_of_range("PreferenceTable: entry out of range");
    }
}

void ipls_update(PreferenceTable& table, std::size_t i, bool succeeded, const IplsContext& context,
                 RandomSource& rng) {
    if (const auto* top = std::get_if<TopPath>(&context)) {
        if (succeeded) {
            if (top->best_layer >= table.layers()) throw std::out_of_range("ipls_update: layer");
            table[i] = top->best_layer;
        }
        return;
    }
    if (succeeded || table.layers() < 2) return;
    // uniform over the other M - 1 layers
    const std::size_t current = table[i];
    std::size_t next = rng.index(table.layers() - 1);
    if (next >= current) ++next;
    table[i] = next;
}

// ---------------------------------------------------------------- Evaluator

Evaluator::Evaluator(const Problem& problem, Budget& budget, std::size_t population_size)
    : problem_(&problem), budget_(&budget), archive_(population_size) {}

double Evaluator::initial(std::span<const double> genome) {
    const double f = evaluate(*problem_, genome, *budget_);
    best_ = std::min(best_, f);
    return f;
}

double Evaluator::trial(std::span<const double> genome, std::size_t producer_rank) {
    const double f = evaluate(*problem_, genome, *budget_);
    if (f < best_) {
        best_ = f;
        stats::nbs_record(producer_rank, archive_);
    }
    return f;
}

// ---------------------------------------------------------------- per-individual steps

RabOutcome rab_evolve_top(std::size_t i, std::span<const std::unique_ptr<Layer>> layers,
                          const GenerationView& view, const Individual& target,
                          std::size_t producer_rank, Evaluator& evaluator, RandomSource& rng) {
    std::vector<TrialProposal> proposals;
    proposals.reserve(layers.size());
    for (std::size_t m = 0; m < layers.size(); ++m) {
        proposals.push_back(layers[m]->propose(i, view, rng));
        proposals.back().layer = m;
    }

    std::vector<double> fitness;
    fitness.reserve(layers.size());
    for (const auto& p : proposals) {
        if (!evaluator.can_evaluate()) break;
        fitness.push_back(evaluator.trial(p.trial, producer_rank));
    }
    for (std::size_t m = 0; m < fitness.size(); ++m) {
        layers[m]->feedback(i, proposals[m], target, fitness[m], rng);
    }

    RabOutcome out{target, 0, false, fitness.size()};
    if (fitness.empty()) return out;
    const auto best = static_cast<std::size_t>(
        std::min_element(fitness.begin(), fitness.end()) - fitness.begin());
    out.best_layer = best;
    auto sel = select_survivor(target, Individual{std::move(proposals[best].trial), fitness[best]});
    out.survivor = std::move(sel.survivor);
    out.succeeded = sel.succeeded;
    return out;
}

InferiorOutcome evolve_inferior(std::size_t i, std::size_t layer,
                                std::span<const std::unique_ptr<Layer>> layers,
                                const GenerationView& view, const Individual& target,
                                std::size_t producer_rank, Evaluator& evaluator, RandomSource& rng) {
    if (!evaluator.can_evaluate()) throw BudgetExhausted();
    TrialProposal proposal = layers[layer]->propose(i, view, rng);
    proposal.layer = layer;
    const double f = evaluator.trial(proposal.trial, producer_rank);
    layers[layer]->feedback(i, proposal, target, f, rng);
    auto sel = select_survivor(target, Individual{std::move(proposal.trial), f});
    return {std::move(sel.survivor), sel.succeeded};
}

// ---------------------------------------------------------------- Engine

Engine::Engine(MlccConfig config, const Problem& problem, Budget& budget, std::uint64_t seed)
    : config_(std::move(config)),
      problem_(&problem),
      budget_(&budget),
      rng_(seed),
      evaluator_(problem, budget, config_.population_size) {
    validate_common(config_);
    for (const auto& spec : config_.layers) layers_.push_back(make_layer(spec));
    record_.problem_id = problem.id;
    record_.seed = seed;
    record_.population_size = config_.population_size;
    for (const auto& spec : config_.layers) record_.layer_names.push_back(layer_name(spec));
}

bool Engine::multi_layer_enabled() const noexcept {
    return layers_.size() > 1 && config_.ablation != Ablation::no_rab &&
           config_.ablation != Ablation::neither;
}

bool Engine::preferences_tracked() const noexcept {
    return layers_.size() > 1 && config_.ablation != Ablation::no_ipls &&
           config_.ablation != Ablation::neither;
}

void Engine::initialize() {
    const std::size_t np = config_.population_size;
    const std::size_t dim = problem_->dimension;
    if (budget_->max_evaluations() < np) {
        throw std::invalid_argument("budget must cover the initial population");
    }
    const Bounds& b = problem_->bounds;
    population_.members.assign(np, Individual{});
    for (auto& ind : population_.members) {
        ind.genome.resize(dim);
        for (std::size_t j = 0; j < dim; ++j) ind.genome[j] = rng_.uniform(b.lower[j], b.upper[j]);
    }
    for (auto& ind : population_.members) ind.fitness = evaluator_.initial(ind.genome);
    population_.generation = 0;

    preferences_ = PreferenceTable(np, layers_.size(), rng_);
    for (auto& layer : layers_) layer->initialize(np, dim, rng_);

    const std::size_t tracked = std::min<std::size_t>(4, np);
    record_.tracked_individuals.clear();
    for (std::size_t i = 0; i < tracked; ++i) record_.tracked_individuals.push_back(i);
    interval_trials_.assign(layers_.size(), 0);
    interval_tracked_.assign(tracked, std::vector<std::uint64_t>(layers_.size(), 0));
    interval_start_ = 0;
    record_.error_trace.assign(1, error_value(evaluator_.best_fitness(), problem_->optimum_value));
}

void Engine::note_trial(std::size_t i, std::size_t layer) {
    ++current_.layer_trials[layer];
    ++interval_trials_[layer];
    if (i < interval_tracked_.size()) ++interval_tracked_[i][layer];
}

void Engine::close_share_interval() {
    std::uint64_t total = 0;
    for (auto c : interval_trials_) total += c;
    if (total == 0) return;
    LayerShareInterval iv;
    iv.first_generation = interval_start_;
    iv.generations = population_.generation - interval_start_;
    for (auto c : interval_trials_) {
        iv.shares.push_back(static_cast<double>(c) / static_cast<double>(total));
    }
    for (const auto& counts : interval_tracked_) {
        std::uint64_t t = 0;
        for (auto c : counts) t += c;
        std::vector<double> s;
        for (auto c : counts) s.push_back(t ? static_cast<double>(c) / static_cast<double>(t) : 0.0);
        iv.tracked.push_back(std::move(s));
    }
    record_.layer_shares.push_back(std::move(iv));
    std::fill(interval_trials_.begin(), interval_trials_.end(), 0);
    for (auto& counts : interval_tracked_) std::fill(counts.begin(), counts.end(), 0);
    interval_start_ = population_.generation;
}

GenerationStats Engine::step() {
    const std::size_t np = population_.size();
    const std::size_t m_count = layers_.size();
    const std::uint64_t used_before = budget_->used();
    current_ = GenerationStats{0, 0, std::vector<std::uint64_t>(m_count, 0), {}};

    const auto order = fitness_order(population_.members);
    FitnessRanks ranks(np);
    for (std::size_t r = 0; r < np; ++r) ranks[order[r]] = r + 1;

    std::vector<char> top(np, 0);
    if (multi_layer_enabled()) {
        const std::size_t top_g = config_.top_g_override
                                      ? *config_.top_g_override
                                      : draw_top_g(rng_, np, config_.n);
        current_.top_g = top_g;
        if (config_.ablation == Ablation::no_fitness_bias) {
            for (std::size_t i : sample_distinct(top_g, {}, np, rng_)) top[i] = 1;
        } else {
            for (std::size_t i = 0; i < np; ++i) top[i] = ranks[i] <= top_g;
        }
        for (std::size_t i = 0; i < np; ++i) {
            if (top[i]) current_.top_individuals.push_back(i);
        }
    }

    const bool sync = config_.update == UpdateMode::synchronous;
    std::vector<Individual> snapshot;
    if (sync) snapshot = population_.members;
    const std::vector<Individual>& source = sync ? snapshot : population_.members;
    const GenerationView view{source, order, order.front(), &problem_->bounds};

    for (std::size_t i = 0; i < np; ++i) {
        if (!evaluator_.can_evaluate()) throw BudgetExhausted();
        const Individual& target = source[i];
        if (top[i]) {
            auto out = rab_evolve_top(i, layers_, view, target, ranks[i], evaluator_, rng_);
            for (std::size_t m = 0; m < out.evaluated; ++m) note_trial(i, m);
            if (preferences_tracked()) {
                ipls_update(preferences_, i, out.succeeded, TopPath{out.best_layer}, rng_);
            }
            population_.members[i] = std::move(out.survivor);
        } else {
            const std::size_t layer =
                preferences_tracked() ? preferences_[i] : (m_count > 1 ? rng_.index(m_count) : 0);
            auto out = evolve_inferior(i, layer, layers_, view, target, ranks[i], evaluator_, rng_);
            note_trial(i, layer);
            if (preferences_tracked()) {
                ipls_update(preferences_, i, out.succeeded, InferiorPath{}, rng_);
            }
            population_.members[i] = std::move(out.survivor);
        }
    }

    for (auto& layer : layers_) layer->end_generation();
    ++population_.generation;
    current_.evaluations = budget_->used() - used_before;
    return current_;
}

RunRecord Engine::run() {
    initialize();
    while (!budget_->exhausted()) {
        try {
            const auto stats = step();
            record_.top_g_trace.push_back(stats.top_g);
            record_.evaluation_trace.push_back(stats.evaluations);
            record_.error_trace.push_back(
                error_value(evaluator_.best_fitness(), problem_->optimum_value));
            if (population_.generation - interval_start_ >= config_.share_interval) {
                close_share_interval();
            }
        } catch (const BudgetExhausted&) {
            record_.error_trace.push_back(
                error_value(evaluator_.best_fitness(), problem_->optimum_value));
            break;
        }
    }
    close_share_interval();

    record_.best_fitness = evaluator_.best_fitness();
    record_.final_error = error_value(record_.best_fitness, problem_->optimum_value);
    record_.evaluations = budget_->used();
    record_.generations = population_.generation;
    record_.rank_archive = evaluator_.rank_archive();
    return record_;
}

RunRecord mlcc_run(const MlccConfig& config, const Problem& problem, Budget budget,
                   std::uint64_t seed) {
    config.validate();
    Engine engine(config, problem, budget, seed);
    return engine.run();
}

RunRecord single_layer_run(const LayerSpec& layer, std::size_t population_size,
                           const Problem& problem, Budget budget, std::uint64_t seed) {
    MlccConfig config;
    config.population_size = population_size;
    config.layers = {layer};
    config.ablation = Ablation::no_rab;
    Engine engine(std::move(config), problem, budget, seed);
    return engine.run();
}

}  // namespace mlcc
