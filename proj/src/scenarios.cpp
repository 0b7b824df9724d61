#include "hypotest/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hypotest/errors.hpp"

namespace hypotest {

double BinaryChannel::transition(int output, int bit) const noexcept {
    if (bit == 0) return output == 0 ? p00() : p10;
    return output == 0 ? p01 : p11();
}

RawPmf binary_channel_raw(std::span<const BinaryChannel> channels) {
    if (channels.empty()) throw Error(ErrorKind::InvalidSpec, "at least one channel is required");
    if (channels.size() > 20) throw Error(ErrorKind::InvalidSpec, "too many channels");
    for (std::size_t k = 0; k < channels.size(); ++k) {
        for (double q : {channels[k].p10, channels[k].p01}) {
            if (!(q >= 0.0 && q <= 1.0)) {
                throw Error(ErrorKind::InvalidProbability,
                            "channel " + std::to_string(k) + " crossover outside [0,1]", k, q);
            }
        }
    }
    const std::size_t n = channels.size();
    const std::size_t count = std::size_t{1} << n;
    RawPmf raw;
    raw.columns.assign(2, std::vector<double>(count, 1.0));
    for (std::size_t y = 0; y < count; ++y) {
        std::string label = "[";
        for (std::size_t k = 0; k < n; ++k) {
            // First channel is the most significant digit: lexicographic order.
            const int out = static_cast<int>((y >> (n - 1 - k)) & 1U);
            label += (k ? "," : "") + std::to_string(out);
            for (int bit = 0; bit < 2; ++bit) raw.columns[bit][y] *= channels[k].transition(out, bit);
        }
        raw.labels.push_back(label + "]");
    }
    return raw;
}

PmfTable binary_channel_pmf(std::span<const BinaryChannel> channels) {
    return validate_pmf(binary_channel_raw(channels));
}

PmfTable Scenario::pmf(const PmfOptions& pmf_options) const {
    if (channels.has_value() == table.has_value()) {
        throw Error(ErrorKind::InvalidSpec, "scenario needs exactly one of channels or table");
    }
    return validate_pmf(channels ? binary_channel_raw(*channels) : *table, pmf_options);
}

Problem Scenario::problem() const {
    return Problem{pmf(), make_criterion(criterion), options};
}

Scenario builtin_scenario(int which) {
    Scenario s;
    double kappa = 0.0;
    switch (which) {
        case 1:
            s.name = "example1";
            s.channels = std::vector<BinaryChannel>{{0.4, 0.1}, {0.4, 0.1}};
            kappa = 5.0;
            break;
        case 2:
            s.name = "example2";
            s.channels = std::vector<BinaryChannel>{{0.3, 0.4}, {0.2, 0.25}};
            kappa = 1.5;
            break;
        default:
            throw Error(ErrorKind::InvalidSpec, "built-in examples are 1 and 2");
    }
    s.criterion = ProspectSpec{ProspectParams{{0.5, 0.5}, {{3.0, 10.0}, {20.0, 7.0}}, kappa}};
    return s;
}

Problem builtin_example(int which) { return builtin_scenario(which).problem(); }

namespace {

std::vector<double> normalized_exponentials(std::mt19937_64& rng, std::size_t count) {
    std::exponential_distribution<double> draw(1.0);
    std::vector<double> x(count);
    double sum = 0.0;
    for (double& v : x) {
        v = draw(rng);
        sum += v;
    }
    for (double& v : x) v /= sum;
    return x;
}

CostModel random_cost(std::mt19937_64& rng, std::size_t m) {
    std::uniform_real_distribution<double> off(0.5, 2.0);
    auto priors = normalized_exponentials(rng, m);
    std::vector<std::vector<double>> costs(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i != j) costs[i][j] = off(rng);
        }
    }
    return CostModel(std::move(priors), std::move(costs));
}

} // namespace

Scenario random_scenario(std::uint64_t seed, std::size_t num_hypotheses,
                         std::size_t num_observations, CriterionKind kind, std::uint64_t cap) {
    if (num_hypotheses < 2 || num_observations < 1) {
        throw Error(ErrorKind::InvalidSpec, "need at least 2 hypotheses and 1 observation");
    }
    if (!rule_count(num_hypotheses, num_observations, cap)) {
        throw Error(ErrorKind::CapExceeded, "too many deterministic rules to enumerate",
                    std::nullopt, std::pow(static_cast<double>(num_hypotheses),
                                           static_cast<double>(num_observations)));
    }
    std::mt19937_64 rng(seed);
    Scenario s;
    s.name = "random-" + std::to_string(seed);
    RawPmf raw;
    for (std::size_t y = 0; y < num_observations; ++y) raw.labels.push_back("y" + std::to_string(y));
    for (std::size_t j = 0; j < num_hypotheses; ++j) {
        raw.columns.push_back(normalized_exponentials(rng, num_observations));
    }
    s.table = raw;
    s.options.seed = seed;

    switch (kind) {
        case CriterionKind::Bayes: s.criterion = BayesSpec{random_cost(rng, num_hypotheses)}; break;
        case CriterionKind::Minimax: s.criterion = MinimaxSpec{random_cost(rng, num_hypotheses)}; break;
        case CriterionKind::NeymanPearson: {
            if (num_hypotheses != 2) {
                throw Error(ErrorKind::InvalidSpec, "Neyman-Pearson needs two hypotheses");
            }
            s.criterion = NeymanPearsonSpec{std::uniform_real_distribution<double>(0.05, 0.3)(rng)};
            break;
        }
        case CriterionKind::RestrictedBayes: {
            CostModel cost = random_cost(rng, num_hypotheses);
            double worst = 0.0;
            for (const auto& row : cost.cost_matrix()) {
                for (double c : row) worst = std::max(worst, c);
            }
            const double slack = std::uniform_real_distribution<double>(0.05, 0.5)(rng);
            const double floor = restricted_bayes_alpha_floor(validate_pmf(raw), cost, s.options);
            s.criterion = RestrictedBayesSpec{cost, floor + slack * (worst - floor)};
            break;
        }
        case CriterionKind::Prospect: {
            std::uniform_real_distribution<double> value(1.0, 20.0);
            ProspectParams params;
            params.priors = normalized_exponentials(rng, num_hypotheses);
            params.values.assign(num_hypotheses, std::vector<double>(num_hypotheses));
            for (auto& row : params.values) {
                for (double& v : row) v = value(rng);
            }
            params.kappa = std::uniform_real_distribution<double>(1.0, 5.0)(rng);
            s.criterion = ProspectSpec{params};
            break;
        }
    }
    return s;
}

Problem random_problem(std::uint64_t seed, std::size_t num_hypotheses, std::size_t num_observations,
                       CriterionKind kind) {
    return random_scenario(seed, num_hypotheses, num_observations, kind).problem();
}

} // namespace hypotest
