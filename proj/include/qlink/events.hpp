#pragma once

#include <cstdint>
#include <vector>

namespace qlink {

// Simulation-only tag; estimators never look at it.
enum class Provenance : std::uint8_t { Signal, ConverterNoise, Dark };

struct DetectionEvent {
    std::int64_t t_ps = 0; // integer picoseconds from run start
    std::uint32_t channel = 0;
    Provenance prov = Provenance::Signal;
};

using EventStream = std::vector<DetectionEvent>;

// Sort by time, ties broken by channel so merged streams order reproducibly.
void sort_stream(EventStream& stream);

} // namespace qlink
