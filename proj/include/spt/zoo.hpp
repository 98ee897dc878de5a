#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spt/backtest.hpp"
#include "spt/generator.hpp"
#include "spt/market_model.hpp"

namespace spt {

enum class ZooKind {
    direct_weight,            // weights stated directly (market, beta, power laws)
    additive_generated,       // weights come from the additive strategy
    rank_constant_rebalanced, // weights sum c_k over rank indicators
};

enum class RankBy { rho, mu };

/// A ready-to-run portfolio: a direct weight rule for backtesting plus, where
/// one exists, the generating function wired for ledger/diagnostic work.
struct ZooEntry {
    std::string name;
    std::string description;
    ZooKind kind = ZooKind::direct_weight;
    std::map<std::string, double> params;

    bool has_generator = false;
    GeneratorSpec generator;
    bool normalize_at_start = false; // divide G by its start value before use

    RankBy rank_by = RankBy::rho;
    // rank-CR composition c (built once d is known); sums to one
    std::function<std::vector<double>(std::size_t d)> rank_coeffs;

    /// Stateful weight rule for the backtester. Generator-backed additive
    /// entries accumulate their Gamma ledger incrementally as the view grows.
    WeightRule make_rule() const;

    /// Validates entry-specific path constraints (rho within [m, M], beta
    /// above delta, continuity) before engine runs or backtests.
    void check_path(const WeightPath& path) const;
};

// --- direct / multiplicatively generated weights ---
ZooEntry market_portfolio();
ZooEntry equal_weight();
ZooEntry book_value_generator();
ZooEntry mtb_weighted_portfolio(double p);
ZooEntry diversity_weighted_portfolio(double p);

// --- additively generated (nondecreasing Gamma) ---
ZooEntry modified_book_value_generator(double m, double M);
ZooEntry modified_mtb_generator(double p, double delta);
ZooEntry logarithmic_generator(double m, double M, double delta);

// --- rank-based constant-rebalanced ---
ZooEntry rank_constant_rebalanced(std::vector<double> c);
ZooEntry ew_top(std::size_t l, RankBy by = RankBy::rho);
ZooEntry ew_bottom(std::size_t l, RankBy by = RankBy::rho);
ZooEntry top_one();
ZooEntry bottom_one();

/// Three-series split of the log relative wealth of the book-value portfolio:
/// the log-generator term, the quadratic-covariation drift and the
/// -integral of log(rho) d(beta continuous). Their sum reproduces the
/// multiplicative log wealth by construction of the shared discretization.
struct BookValueDecomposition {
    std::vector<double> log_g_term;
    std::vector<double> quadratic_term;
    std::vector<double> beta_term;
    std::vector<double> log_v; // sum of the three
};

BookValueDecomposition book_value_log_decomposition(const WeightPath& path);

/// Registry: builds an entry from "name" plus named parameters; unknown names
/// are rejected. Entries whose bounds default from the data (m, M, delta)
/// resolve them from `path_hint` when given, mirroring the usual practice of
/// estimating the bounds from the panel before running.
ZooEntry make_entry(const std::string& name, const std::map<std::string, double>& params,
                    const WeightPath* path_hint = nullptr);

/// Parses "name" or "name:key=value,key=value" into a registry call.
ZooEntry parse_entry(const std::string& text, const WeightPath* path_hint = nullptr);

std::vector<std::string> zoo_names();

} // namespace spt
