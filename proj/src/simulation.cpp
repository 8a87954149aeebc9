#include "crsep/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "crsep/analytic.hpp"
#include "crsep/parallel.hpp"

namespace crsep {

TrialSimulator::TrialSimulator(const Scenario& scenario)
    : scenario_(scenario), unit_points_(build_constellation({scenario.modulation, 1.0})) {
    scenario_.validate();
}

TrialOutcome TrialSimulator::run(RandomStream& rng) const {
    const Scenario& s = scenario_;
    TrialOutcome out;
    const OccupancyDraw occ = sample_occupancy_and_decision(s.sensing, rng);
    out.true_state = occ.true_state;
    out.decision = occ.decision;
    if (s.scheme == Scheme::osa && occ.decision == ChannelState::busy) {
        out.skipped = true;
        return out;
    }

    const ConstellationPoint& sent = unit_points_[rng.index(static_cast<std::uint32_t>(unit_points_.size()))];
    const std::complex<double> h = rng.complex_normal(0.5);
    out.fading_power = std::norm(h);

    double power = s.power(occ.decision);
    if (s.policy == PowerPolicy::peak_interference)
        power = peak_power_policy(s.constraints, rng.exponential(s.constraints.mean_gain_to_primary));

    std::complex<double> y = h * std::sqrt(power) * sent.amplitude + rng.complex_normal(s.noise_variance);
    if (occ.true_state == ChannelState::busy) y += sample_mixture(s.interference, rng);

    SymbolIndex decided{0, 0};
    const FadingSample fading = FadingSample::from_complex(h);
    if (power > 0.0 && fading.magnitude > 0.0)
        decided = detect_threshold({s.modulation, power}, derotate(y, fading), fading.magnitude);
    out.error = !(decided == SymbolIndex{sent.n, sent.q});
    return out;
}

TrialOutcome run_trial(const Scenario& scenario, RandomStream& rng) {
    return TrialSimulator(scenario).run(rng);
}

double wilson_half_width(std::uint64_t k, std::uint64_t n) {
    if (n == 0) return 0.0;
    constexpr double z = 1.959963984540054;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    return z / (1.0 + z2 / nn) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
}

SepEstimate run_monte_carlo(const Scenario& scenario, const MonteCarloConfig& config) {
    if (config.trials == 0) throw std::invalid_argument("run_monte_carlo: trials must be positive");
    if (config.chunk_size == 0) throw std::invalid_argument("run_monte_carlo: chunk size must be positive");
    const TrialSimulator sim(scenario);

    struct Tally {
        std::uint64_t errors = 0;
        std::uint64_t skipped = 0;
        std::uint64_t total = 0;
    };
    const std::uint64_t chunks = (config.trials + config.chunk_size - 1) / config.chunk_size;
    std::vector<Tally> tallies(chunks);
    parallel_for(chunks, config.workers, [&](std::size_t c) {
        RandomStream rng(config.master_seed, c);
        const std::uint64_t begin = c * config.chunk_size;
        const std::uint64_t count = std::min(config.chunk_size, config.trials - begin);
        Tally t;
        for (std::uint64_t i = 0; i < count; ++i) {
            const TrialOutcome o = sim.run(rng);
            t.skipped += o.skipped;
            t.errors += o.error;
        }
        t.total = count;
        tallies[c] = t;
    });

    SepEstimate est;
    for (const Tally& t : tallies) {
        est.errors += t.errors;
        est.skipped += t.skipped;
        est.total += t.total;
    }
    est.trials = config.count_skips_as_correct ? est.total : est.total - est.skipped;
    if (est.trials == 0)
        throw InsufficientDataError("run_monte_carlo: no trial transmitted; SEP undefined");
    est.sep = static_cast<double>(est.errors) / static_cast<double>(est.trials);
    est.ci95_half_width = wilson_half_width(est.errors, est.trials);
    return est;
}

}  // namespace crsep
