#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairaudit/data_model.hpp"
#include "fairaudit/errors.hpp"
#include "fairaudit/scoring.hpp"

// Constructive generators for the toolkit's verification corpus: count
// recipes where a fair union hides maximally unfair parts (and the reverse),
// tables where correlation and discrimination move in opposite directions,
// and the small scatter-plot fixtures used throughout the tests.

namespace fairaudit {

/// Exact rational parameter, kept as numerator/denominator so integrality of
/// derived counts can be checked without floating-point slack.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline void check_rational(const Rational& r, const std::string& what) {
    if (r.den <= 0) throw parameter_error(what + ": denominator must be positive");
    if (r.num < 0) throw parameter_error(what + ": must be nonnegative");
}

/// A union table split into two parts with e = part_a + part_b fieldwise,
/// plus the closed-form scores of all three tables.
struct ParadoxInstance {
    CountsTable combined;
    CountsTable part_a;
    CountsTable part_b;
    double combined_score = 0.0;
    double part_a_score = 0.0;
    double part_b_score = 0.0;
    std::int64_t K = 0;
    std::optional<std::int64_t> m;        // merge recipe only
    std::optional<Rational> alpha_prime;  // merge recipe only
    std::optional<double> alpha;          // merge recipe only
    std::optional<bool> over_limit;       // merge recipe: combined score > alpha
};

/// Fair union, maximally unfair parts: combined (K,K,K,K) scores 0 while the
/// parts (K,0,0,K) and (0,K,K,0) score +1 and -1.
inline ParadoxInstance gen_simpson_split(std::int64_t K) {
    if (K <= 0) throw parameter_error("K must be a positive integer");
    ParadoxInstance out;
    out.K = K;
    out.combined = {K, K, K, K};
    out.part_a = {K, 0, 0, K};
    out.part_b = {0, K, K, 0};
    out.combined_score = 0.0;
    out.part_a_score = 1.0;
    out.part_b_score = -1.0;
    return out;
}

namespace detail {

/// alpha' * factor * K must be an integer; returns the exact product.
inline std::int64_t exact_product(const Rational& ap, std::int64_t factor, std::int64_t K,
                                  const std::string& label) {
    const std::int64_t num = ap.num * factor * K;
    if (num % ap.den != 0)
        throw integrality_error(label + " = " + std::to_string(ap.num) + "/" +
                                std::to_string(ap.den) + " * " + std::to_string(factor * K) +
                                " is not an integer");
    return num / ap.den;
}

inline void check_nonnegative(const CountsTable& c, const std::string& label) {
    if (c.f11 < 0 || c.f10 < 0 || c.f01 < 0 || c.f00 < 0)
        throw parameter_error(label + " has a negative count; shrink alpha' or m");
}

} // namespace detail

/// Parts below the limit, union above it: part_a scores 0, part_b scores
/// alpha'/2, and the merged table scores m*alpha'/3, which exceeds alpha
/// exactly when m > 3*alpha/alpha'.
inline ParadoxInstance gen_simpson_merge(std::int64_t K, std::int64_t m,
                                         const Rational& alpha_prime, double alpha) {
    if (K <= 0) throw parameter_error("K must be a positive integer");
    if (m <= 0) throw parameter_error("m must be a positive integer");
    check_rational(alpha_prime, "alpha'");
    if (!(alpha > 0.0)) throw parameter_error("alpha must be > 0");
    if (!(alpha_prime.value() < alpha))
        throw parameter_error("alpha' must be smaller than alpha");

    const std::int64_t amK = detail::exact_product(alpha_prime, m, K, "alpha' * m * K");
    const std::int64_t aK = detail::exact_product(alpha_prime, 1, K, "alpha' * K");
    const std::int64_t amK2 = detail::exact_product(alpha_prime, 2 * m, K, "2 * alpha' * m * K");

    ParadoxInstance out;
    out.K = K;
    out.m = m;
    out.alpha_prime = alpha_prime;
    out.alpha = alpha;
    out.part_a = {amK2, amK, 2 * K - amK2, K - amK};
    out.part_b = {aK, aK, K - aK, 2 * K - aK};
    out.combined = out.part_a + out.part_b;
    detail::check_nonnegative(out.part_a, "first part");
    detail::check_nonnegative(out.part_b, "second part");

    out.part_a_score = 0.0;
    out.part_b_score = alpha_prime.value() / 2.0;
    out.combined_score = static_cast<double>(m) * alpha_prime.value() / 3.0;
    // m*alpha'/3 > alpha, compared on the exact side: m*num > 3*den*alpha.
    out.over_limit =
        static_cast<double>(m * alpha_prime.num) > 3.0 * static_cast<double>(alpha_prime.den) * alpha;
    return out;
}

/// Two tables where the odds ratios and the risk differences rank opposite
/// ways: first = (mK, K, K, K), second = (K, wK, K, K).
struct CorrelationInstance {
    CountsTable first;
    CountsTable second;
    std::int64_t m = 0;
    Rational w;
    std::int64_t K = 0;
    double oz_first = 0.0;
    double oz_second = 0.0;
    double dz = 0.0;             // oz_first - oz_second = m - 1/w
    double ddelta = 0.0;         // m/(m+1) - w/(w+1)
    double delta_first = 0.0;    // group score of the first table
    double delta_second = 0.0;   // group score of the second table
    bool counterexample_regime = false; // 1/w > m > max(w, 1)
};

inline CorrelationInstance gen_corr_counterexample(std::int64_t m, const Rational& w,
                                                   std::int64_t K) {
    if (m <= 0) throw parameter_error("m must be a positive integer");
    if (K <= 0) throw parameter_error("K must be a positive integer");
    check_rational(w, "w");
    if (w.num == 0) throw parameter_error("w must be positive");
    if ((w.num * K) % w.den != 0)
        throw integrality_error("w * K = " + std::to_string(w.num) + "/" +
                                std::to_string(w.den) + " * " + std::to_string(K) +
                                " is not an integer");
    const std::int64_t wK = w.num * K / w.den;

    CorrelationInstance out;
    out.m = m;
    out.w = w;
    out.K = K;
    out.first = {m * K, K, K, K};
    out.second = {K, wK, K, K};
    out.oz_first = static_cast<double>(m);
    out.oz_second = static_cast<double>(w.den) / static_cast<double>(w.num);
    out.dz = static_cast<double>(m) - out.oz_second;
    out.ddelta = static_cast<double>(m) / static_cast<double>(m + 1) -
                 static_cast<double>(w.num) / static_cast<double>(w.num + w.den);
    out.delta_first = group_score(out.first).value;
    out.delta_second = group_score(out.second).value;
    const double wv = w.value();
    out.counterexample_regime =
        1.0 / wv > static_cast<double>(m) && static_cast<double>(m) > std::max(wv, 1.0);
    return out;
}

namespace detail {

inline void emit_division(Dataset& data, std::uint8_t d, std::uint8_t p, std::uint8_t e,
                          std::int64_t count) {
    for (std::int64_t i = 0; i < count; ++i) data.append_row({d, p, e});
}

/// Rows for one part, divisions in f11, f10, f01, f00 order.
inline void emit_counts(Dataset& data, const CountsTable& c, std::uint8_t e) {
    emit_division(data, 1, 1, e, c.f11);
    emit_division(data, 1, 0, e, c.f10);
    emit_division(data, 0, 1, e, c.f01);
    emit_division(data, 0, 0, e, c.f00);
}

inline Schema paradox_schema() {
    return Schema({{"D", Role::Outcome}, {"P", Role::Protected}, {"E", Role::Explanatory}});
}

} // namespace detail

/// A two-column dataset (D outcome, P protected) realizing one counts table.
inline Dataset make_dataset(const CountsTable& c) {
    Dataset data(Schema({{"D", Role::Outcome}, {"P", Role::Protected}}));
    data.reserve(static_cast<std::size_t>(c.total()));
    for (std::int64_t i = 0; i < c.f11; ++i) data.append_row({1, 1});
    for (std::int64_t i = 0; i < c.f10; ++i) data.append_row({1, 0});
    for (std::int64_t i = 0; i < c.f01; ++i) data.append_row({0, 1});
    for (std::int64_t i = 0; i < c.f00; ++i) data.append_row({0, 0});
    return data;
}

/// Three-column dataset (D, P, E): part_a rows carry E=1, part_b rows E=0.
/// Row order is deterministic: part then division then count index.
inline Dataset materialize(const ParadoxInstance& inst) {
    Dataset data(detail::paradox_schema());
    data.reserve(static_cast<std::size_t>(inst.combined.total()));
    detail::emit_counts(data, inst.part_a, 1);
    detail::emit_counts(data, inst.part_b, 0);
    return data;
}

inline Dataset materialize(const CorrelationInstance& inst) {
    Dataset data(detail::paradox_schema());
    data.reserve(static_cast<std::size_t>(inst.first.total() + inst.second.total()));
    detail::emit_counts(data, inst.first, 1);
    detail::emit_counts(data, inst.second, 0);
    return data;
}

/// Small two-attribute fixtures (D outcome, G protected) with observed data
/// and hand-picked prediction variants:
///   scatter_a      : counts (1,6,5,2), score 1/6 - 6/8 = -0.5833
///   scatter_b_pred : the one positive in the protected group flipped, -0.75
///   scatter_d_pred : 3 of 6 vs 4 of 8 predicted positive, score 0
///   balanced       : equal positive fractions, score 0
///   balanced_pred  : one flip that makes the predictions discriminatory
struct FigureFixtures {
    Dataset scatter_a;
    Dataset scatter_b_pred;
    Dataset scatter_d_pred;
    Dataset balanced;
    Dataset balanced_pred;
};

inline FigureFixtures gen_figure_fixtures() {
    Schema schema({{"D", Role::Outcome}, {"G", Role::Protected}});
    FigureFixtures out;

    // (D, G) rows in division order f11, f10, f01, f00.
    Dataset a(schema);
    for (int i = 0; i < 1; ++i) a.append_row({1, 1});
    for (int i = 0; i < 6; ++i) a.append_row({1, 0});
    for (int i = 0; i < 5; ++i) a.append_row({0, 1});
    for (int i = 0; i < 2; ++i) a.append_row({0, 0});
    out.scatter_a = a;

    // One wrong prediction: the single protected positive becomes negative.
    std::vector<std::uint8_t> b_outcomes = {0, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
    out.scatter_b_pred = a.with_outcome(b_outcomes, OutcomeKind::Predicted);

    // Boundary giving 3/6 and 4/8 predicted positives: the protected positive
    // stays right, two protected negatives flip up, two unprotected positives
    // flip down.
    std::vector<std::uint8_t> d_outcomes = {1, 1, 1, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0};
    out.scatter_d_pred = a.with_outcome(d_outcomes, OutcomeKind::Predicted);

    Dataset bal(schema);
    for (int i = 0; i < 3; ++i) bal.append_row({1, 1});
    for (int i = 0; i < 4; ++i) bal.append_row({1, 0});
    for (int i = 0; i < 3; ++i) bal.append_row({0, 1});
    for (int i = 0; i < 4; ++i) bal.append_row({0, 0});
    out.balanced = bal;

    // One error: a protected positive predicted negative tips the balance.
    std::vector<std::uint8_t> bal_pred = {0, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
    out.balanced_pred = bal.with_outcome(bal_pred, OutcomeKind::Predicted);

    return out;
}

} // namespace fairaudit
