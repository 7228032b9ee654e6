#pragma once

#include <concepts>
#include <utility>

#include "steinpair/cond_stats.hpp"
#include "steinpair/rng.hpp"
#include "steinpair/targets.hpp"

namespace steinpair {

/// Contract a model fulfills to plug into the bound estimators: an exact
/// configuration sampler, the statistic W, a closed-form CondStats kernel,
/// the regression constant lambda and a target law.
template <class M>
concept PairModel = requires(const M& m, RngStream& rng,
                             const typename M::config_type& cfg) {
    typename M::config_type;
    { m.sample_config(rng) } -> std::same_as<typename M::config_type>;
    { m.w_of(cfg) } -> std::convertible_to<double>;
    { m.cond_stats(cfg) } -> std::same_as<CondStats>;
    { m.lambda() } -> std::convertible_to<double>;
    { m.target() } -> std::convertible_to<const TargetLaw&>;
};

/// Optional capability: one (W, W') draw from the exchangeable coupling.
template <class M>
concept HasPairSampler = requires(const M& m, RngStream& rng) {
    { m.sample_pair(rng) } -> std::same_as<std::pair<double, double>>;
};

/// Optional capability: an a.s. bound delta on |Delta|.
template <class M>
concept HasDeltaBound = requires(const M& m) {
    { m.delta_max() } -> std::convertible_to<double>;
};

/// Shared standard normal target (drift g(w) = w), built once.
const TargetLaw& standard_normal_target();

}  // namespace steinpair
