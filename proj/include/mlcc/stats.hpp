#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mlcc::stats {

class AllZero : public std::domain_error {
public:
    AllZero() : std::domain_error("all differences are zero") {}
};

class EmptyArchive : public std::domain_error {
public:
    EmptyArchive() : std::domain_error("rank archive is empty") {}
};

/// Largest sample size for which the signed-rank p-value is computed exactly.
inline constexpr std::size_t kExactWilcoxonLimit = 20;

struct WilcoxonResult {
    double r_plus = 0.0;
    double r_minus = 0.0;
    double p_value = 1.0;
    bool significant = false;
    /// Number of nonzero differences that were ranked.
    std::size_t n = 0;
    bool exact = false;
};

/// Midranks (1-based) of `values`; tied values share the mean of their ranks.
std::vector<double> midranks(std::span<const double> values);

/// Two-sided Wilcoxon signed-rank test. Zero differences are dropped; the
/// rest are ranked by magnitude with midranks. n <= 20 uses the exact
/// permutation distribution, larger n the tie- and continuity-corrected
/// normal approximation. Throws AllZero when nothing is left to rank.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences, double alpha = 0.05);

/// Exact two-sided p for the signed-rank statistic given the (mid)ranks of the
/// nonzero differences and the observed positive rank sum.
double wilcoxon_exact_p(std::span<const double> ranks, double r_plus);
/// Normal approximation with tie and continuity corrections.
double wilcoxon_normal_p(std::span<const double> ranks, double r_plus);

/// Outcome of one per-problem comparison, read as "the compared algorithm is
/// significantly worse / similar / better than the considered one".
enum class Sign { minus, equal, plus };

char to_char(Sign s) noexcept;

/// Paired per-run comparison of `compared` against `considered` (errors,
/// lower is better).
Sign single_problem_compare(std::span<const double> considered, std::span<const double> compared,
                            double alpha = 0.05);

struct SignSummary {
    std::size_t minus = 0;
    std::size_t equal = 0;
    std::size_t plus = 0;

    void add(Sign s);
    std::size_t total() const noexcept { return minus + equal + plus; }
    /// Functions where the considered algorithm wins minus those it loses.
    long p_n() const noexcept { return static_cast<long>(minus) - static_cast<long>(plus); }
    /// "m/e/p"
    std::string str() const;
};

/// Multi-problem test over per-function mean errors. R+ collects the
/// functions on which `considered` has the lower mean error.
WilcoxonResult multi_problem_wilcoxon(std::span<const double> considered,
                                      std::span<const double> compared, double alpha = 0.05);

/// Friedman mean ranks. `errors[f][a]` is algorithm a's mean error on
/// function f; rank 1 is the smallest error, ties share midranks.
std::vector<double> friedman_mean_ranks(const std::vector<std::vector<double>>& errors);

/// Ranks (1 = best) of the individuals that produced new best solutions.
class RankArchive {
public:
    explicit RankArchive(std::size_t population_size = 0) : frequency_(population_size, 0) {}

    void record(std::size_t rank);

    const std::vector<std::size_t>& ranks() const noexcept { return ranks_; }
    /// frequency()[r - 1] counts NBS events from rank r.
    const std::vector<std::uint64_t>& frequency() const noexcept { return frequency_; }
    std::size_t population_size() const noexcept { return frequency_.size(); }
    bool empty() const noexcept { return ranks_.empty(); }
    std::size_t size() const noexcept { return ranks_.size(); }

private:
    std::vector<std::size_t> ranks_;
    std::vector<std::uint64_t> frequency_;
};

void nbs_record(std::size_t rank_of_target, RankArchive& archive);

/// Mean archived rank. Throws EmptyArchive.
double ar_statistic(const RankArchive& archive);
std::optional<double> ar_statistic_or_none(const RankArchive& archive);

/// (NP + 1) / 2: the mean rank when NBS production ignores rank.
double ar_expected(std::size_t population_size) noexcept;

double mean(std::span<const double> v);
double stddev(std::span<const double> v);
double median(std::span<const double> v);

}  // namespace mlcc::stats
