#include "mlcc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mlcc::stats {

std::vector<double> midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && values[idx[j]] == values[idx[i]]) ++j;
        // positions i..j-1 share ranks i+1..j
        const double r = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[idx[k]] = r;
        i = j;
    }
    return ranks;
}

double wilcoxon_exact_p(std::span<const double> ranks, double r_plus) {
    // Midranks are multiples of 1/2, so doubled ranks are exact integers.
    std::vector<std::size_t> doubled(ranks.size());
    std::size_t total = 0;
    for (std::size_t k = 0; k < ranks.size(); ++k) {
        doubled[k] = static_cast<std::size_t>(std::llround(2.0 * ranks[k]));
        total += doubled[k];
    }
    std::vector<std::uint64_t> count(total + 1, 0);
    count[0] = 1;
    std::size_t reach = 0;
    for (std::size_t d : doubled) {
        reach += d;
        for (std::size_t s = reach; s >= d; --s) {
            count[s] += count[s - d];
            if (s == d) break;
        }
    }
    const auto observed = static_cast<std::size_t>(std::llround(2.0 * r_plus));
    std::uint64_t le = 0, ge = 0;
    for (std::size_t s = 0; s <= total; ++s) {
        if (s <= observed) le += count[s];
        if (s >= observed) ge += count[s];
    }
    const double all = std::ldexp(1.0, static_cast<int>(ranks.size()));
    const double tail = static_cast<double>(std::min(le, ge)) / all;
    return std::min(1.0, 2.0 * tail);
}

double wilcoxon_normal_p(std::span<const double> ranks, double r_plus) {
    const double n = static_cast<double>(ranks.size());
    const double mu = n * (n + 1.0) / 4.0;
    std::vector<double> sorted(ranks.begin(), ranks.end());
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i + 1;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if (var <= 0.0) return 1.0;
    const double z = std::max(std::abs(r_plus - mu) - 0.5, 0.0) / std::sqrt(var);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences, double alpha) {
    std::vector<double> nonzero;
    for (double d : differences) {
        if (d != 0.0) nonzero.push_back(d);
    }
    if (nonzero.empty()) throw AllZero();

    std::vector<double> magnitude(nonzero.size());
    std::transform(nonzero.begin(), nonzero.end(), magnitude.begin(),
                   [](double d) { return std::abs(d); });
    const auto ranks = midranks(magnitude);

    WilcoxonResult out;
    out.n = nonzero.size();
    for (std::size_t k = 0; k < nonzero.size(); ++k) {
        (nonzero[k] > 0.0 ? out.r_plus : out.r_minus) += ranks[k];
    }
    out.exact = out.n <= kExactWilcoxonLimit;
    out.p_value = out.exact ? wilcoxon_exact_p(ranks, out.r_plus)
                            : wilcoxon_normal_p(ranks, out.r_plus);
    out.significant = out.p_value < alpha;
    return out;
}

char to_char(Sign s) noexcept {
    switch (s) {
        case Sign::minus: return '-';
        case Sign::equal: return '=';
        case Sign::plus: return '+';
    }
    return '?';
}

Sign single_problem_compare(std::span<const double> considered, std::span<const double> compared,
                            double alpha) {
    if (considered.size() != compared.size()) {
        throw std::invalid_argument("single_problem_compare: run counts differ");
    }
    std::vector<double> diff(considered.size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = compared[k] - considered[k];
    WilcoxonResult w;
    try {
        w = wilcoxon_signed_rank(diff, alpha);
    } catch (const AllZero&) {
        return Sign::equal;
    }
    if (!w.significant) return Sign::equal;
    // positive differences: the compared algorithm has larger errors
    const double med = median(diff);
    if (med > 0.0) return Sign::minus;
    if (med < 0.0) return Sign::plus;
    return w.r_plus > w.r_minus ? Sign::minus : Sign::plus;
}

void SignSummary::add(Sign s) {
    switch (s) {
        case Sign::minus: ++minus; break;
        case Sign::equal: ++equal; break;
        case Sign::plus: ++plus; break;
    }
}

std::string SignSummary::str() const {
    return std::to_string(minus) + "/" + std::to_string(equal) + "/" + std::to_string(plus);
}

WilcoxonResult multi_problem_wilcoxon(std::span<const double> considered,
                                      std::span<const double> compared, double alpha) {
    if (considered.size() != compared.size()) {
        throw std::invalid_argument("multi_problem_wilcoxon: function counts differ");
    }
    std::vector<double> diff(considered.size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = compared[k] - considered[k];
    return wilcoxon_signed_rank(diff, alpha);
}

std::vector<double> friedman_mean_ranks(const std::vector<std::vector<double>>& errors) {
    if (errors.empty()) throw std::invalid_argument("friedman_mean_ranks: no functions");
    const std::size_t algorithms = errors.front().size();
    if (algorithms < 2) throw std::invalid_argument("friedman_mean_ranks: need 2+ algorithms");
    std::vector<double> sum(algorithms, 0.0);
    for (const auto& row : errors) {
        if (row.size() != algorithms) throw std::invalid_argument("friedman_mean_ranks: ragged");
        const auto r = midranks(row);
        for (std::size_t a = 0; a < algorithms; ++a) sum[a] += r[a];
    }
    for (double& s : sum) s /= static_cast<double>(errors.size());
    return sum;
}

void RankArchive::record(std::size_t rank) {
    if (rank == 0 || rank > frequency_.size()) {
        throw std::out_of_range("RankArchive: rank " + std::to_string(rank) + " outside [1, " +
                                std::to_string(frequency_.size()) + "]");
    }
    ranks_.push_back(rank);
    ++frequency_[rank - 1];
}

void nbs_record(std::size_t rank_of_target, RankArchive& archive) {
    archive.record(rank_of_target);
}

double ar_statistic(const RankArchive& archive) {
    if (archive.empty()) throw EmptyArchive();
    double sum = 0.0;
    for (std::size_t r : archive.ranks()) sum += static_cast<double>(r);
    return sum / static_cast<double>(archive.size());
}

std::optional<double> ar_statistic_or_none(const RankArchive& archive) {
    if (archive.empty()) return std::nullopt;
    return ar_statistic(archive);
}

double ar_expected(std::size_t population_size) noexcept {
    return (static_cast<double>(population_size) + 1.0) / 2.0;
}

double mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double median(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty sample");
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    return n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

}  // namespace mlcc::stats
