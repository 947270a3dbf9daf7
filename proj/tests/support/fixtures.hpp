#pragma once

// Shared test fixtures: a portable deterministic RNG, random dataset
// generators, the worked tables from the README examples, and the
// credit-shaped 1000-row raw file used by the end-to-end runs.

#include <cstdint>
#include <string>
#include <vector>

#include "fairaudit/data_model.hpp"

namespace fixtures {

/// splitmix64: tiny, portable, deterministic across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, n).
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    /// Bernoulli with probability p.
    bool chance(double p) { return double(next() >> 11) * 0x1.0p-53 < p; }

private:
    std::uint64_t state_;
};

/// Random binary dataset: D outcome, `n_protected` protected attributes,
/// `n_explanatory` explanatory ones, values drawn independently with
/// per-column biases so contrasts and degenerate groups both occur.
inline fairaudit::Dataset random_dataset(Rng& rng, std::size_t rows, std::size_t n_protected,
                                         std::size_t n_explanatory) {
    using namespace fairaudit;
    std::vector<Attribute> attrs;
    attrs.push_back({"D", Role::Outcome});
    for (std::size_t i = 0; i < n_protected; ++i)
        attrs.push_back({"P" + std::to_string(i), Role::Protected});
    for (std::size_t i = 0; i < n_explanatory; ++i)
        attrs.push_back({"E" + std::to_string(i), Role::Explanatory});

    std::vector<double> bias;
    for (std::size_t c = 0; c < attrs.size(); ++c)
        bias.push_back(0.15 + 0.7 * (double(rng.next() >> 11) * 0x1.0p-53));

    Dataset data{Schema(attrs)};
    data.reserve(rows);
    std::vector<std::uint8_t> row(attrs.size());
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < attrs.size(); ++c)
            row[c] = rng.chance(bias[c]) ? 1 : 0;
        data.append_row(row);
    }
    return data;
}

/// Both outcome classes forced present (first two rows pinned to 1 and 0),
/// for tests that need BCR to be defined.
inline fairaudit::Dataset ensure_both_classes(const fairaudit::Dataset& data) {
    std::vector<std::uint8_t> outcomes(data.row_count());
    for (std::size_t r = 0; r < data.row_count(); ++r) outcomes[r] = data.outcome(r);
    outcomes[0] = 1;
    outcomes[1] = 0;
    return data.with_outcome(outcomes, fairaudit::OutcomeKind::Observed);
}

/// Random prediction column over an observed dataset: each outcome is
/// flipped with probability `error_rate`.
inline fairaudit::Dataset random_predictions(Rng& rng, const fairaudit::Dataset& observed,
                                             double error_rate) {
    std::vector<std::uint8_t> outcomes(observed.row_count());
    for (std::size_t r = 0; r < observed.row_count(); ++r) {
        std::uint8_t v = observed.outcome(r);
        outcomes[r] = rng.chance(error_rate) ? (v ^ 1) : v;
    }
    return observed.with_outcome(outcomes, fairaudit::OutcomeKind::Predicted);
}

/// The 125-row income example: D outcome, G protected, S explanatory.
/// Sector S=1 has divisions (9,3,20,30); sector S=0 has (1,12,20,30).
inline fairaudit::Dataset income_example() {
    using namespace fairaudit;
    Dataset data(Schema({{"D", Role::Outcome}, {"G", Role::Protected}, {"S", Role::Explanatory}}));
    auto block = [&](std::uint8_t s, int n11, int n10, int n01, int n00) {
        for (int i = 0; i < n11; ++i) data.append_row({1, 1, s});
        for (int i = 0; i < n10; ++i) data.append_row({1, 0, s});
        for (int i = 0; i < n01; ++i) data.append_row({0, 1, s});
        for (int i = 0; i < n00; ++i) data.append_row({0, 0, s});
    };
    block(1, 9, 3, 20, 30);
    block(0, 1, 12, 20, 30);
    return data;
}

/// The four-row performance example: D outcome, G protected, M other.
inline fairaudit::Dataset performance_example() {
    using namespace fairaudit;
    Dataset data(Schema({{"D", Role::Outcome}, {"G", Role::Protected}, {"M", Role::Other}}));
    data.append_row({1, 1, 1});
    data.append_row({0, 1, 0});
    data.append_row({1, 0, 0});
    data.append_row({0, 0, 0});
    return data;
}

} // namespace fixtures
