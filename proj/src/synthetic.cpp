#include "dri/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dri/rng.hpp"

namespace dri {

    Instance synthetic_instance(const SyntheticSpec& spec) {
        if (spec.customers < 0) throw std::invalid_argument("customer count must be non-negative");
        if (spec.area <= 0.0 || spec.capacity <= 0.0 || spec.horizon <= 0.0)
            throw std::invalid_argument("area, capacity and horizon must be positive");
        if (spec.demand_min < 0.0 || spec.demand_max < spec.demand_min)
            throw std::invalid_argument("invalid demand range");
        if (spec.window_min <= 0.0 || spec.window_max < spec.window_min)
            throw std::invalid_argument("invalid window range");

        rng::SplitMix64 random(rng::derive(spec.seed, 0x73796E74U));
        const double cx = spec.area / 2.0;
        const double cy = spec.area / 2.0;

        Instance instance;
        instance.name = "synth_" + std::to_string(spec.seed) + "_" + std::to_string(spec.customers);
        instance.capacity = spec.capacity;
        instance.vertices.push_back({0, cx, cy, 0.0, 0.0, spec.horizon, 0.0});

        double total_demand = 0.0;
        for (int i = 1; i <= spec.customers; ++i) {
            Vertex v;
            v.id = i;
            v.x = random.next_double(0.0, spec.area);
            v.y = random.next_double(0.0, spec.area);
            v.demand = std::floor(random.next_double(spec.demand_min, spec.demand_max + 1.0));
            v.demand = std::min(v.demand, std::min(spec.demand_max, spec.capacity));
            v.service = spec.service;

            // Keep [ready, due] inside the span where the round trip
            // depot → i → depot still fits the depot window.
            const double trip = std::hypot(v.x - cx, v.y - cy);
            double width = random.next_double(spec.window_min, spec.window_max);
            const double latest_ready = spec.horizon - trip - spec.service - width;
            if (latest_ready < trip) {
                // Window too wide for this horizon; shrink it to fit.
                width = std::max(1.0, spec.horizon - 2.0 * trip - spec.service - 1.0);
            }
            v.ready = random.next_double(trip, std::max(trip, spec.horizon - trip - spec.service - width));
            v.due = v.ready + width;
            total_demand += v.demand;
            instance.vertices.push_back(v);
        }

        instance.fleet_size =
            spec.fleet > 0
                ? spec.fleet
                : std::max(2, static_cast<int>(std::ceil(total_demand / spec.capacity)) + spec.customers / 10 + 1);
        instance.finalize();
        return instance;
    }

}  // namespace dri
