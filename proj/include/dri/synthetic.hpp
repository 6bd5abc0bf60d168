#pragma once

#include <cstdint>

#include "dri/instance.hpp"

namespace dri {

    // Knobs for seeded random instances. Windows are drawn so that every
    // customer is reachable alone (depot → i → depot always fits), which keeps
    // generated instances feasible regardless of how routes are formed.
    struct SyntheticSpec {
        int customers = 50;
        std::uint64_t seed = 1;
        double area = 100.0;          // customers drawn uniformly in [0, area]^2
        double capacity = 200.0;
        double demand_min = 1.0;      // integer demands drawn from this range
        double demand_max = 30.0;
        double service = 10.0;
        double window_min = 30.0;     // customer window width range
        double window_max = 120.0;
        double horizon = 1000.0;      // depot closes at this time
        int fleet = 0;                // 0 derives a generous fleet from demand
    };

    Instance synthetic_instance(const SyntheticSpec& spec);

}  // namespace dri
