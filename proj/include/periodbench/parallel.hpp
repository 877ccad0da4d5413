#pragma once

#include <cstddef>

namespace periodbench {

/// Selects between the OpenMP kernels and the serial reference path.
enum class Execution { Serial, Parallel };

/// Particle counts below this stay on one thread; team start-up dominates otherwise.
inline constexpr std::ptrdiff_t kParallelGrain = 2048;

/// True when a parallel region of `n` iterations should open a thread team.
/// Always false when already inside a parallel region, so Monte Carlo level
/// parallelism does not nest with the particle kernels.
bool use_thread_team(Execution exec, std::ptrdiff_t n);

int max_threads();
void set_threads(int n);

}  // namespace periodbench
