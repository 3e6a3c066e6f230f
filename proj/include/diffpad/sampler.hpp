#pragma once

#include "diffpad/denoiser.hpp"
#include "diffpad/fft_solvers.hpp"
#include "diffpad/image.hpp"
#include "diffpad/schedule.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace diffpad {

struct SuperResolutionTask {
    int scale = 1;
    ConvKernel kernel;
};

struct InpaintingTask {
    BinaryMask mask;  // 1 observed, 0 masked
};

/// One conditional restoration problem: the degradation variant, the
/// degraded observation y and its noise level sigma.
struct RestorationTask {
    std::variant<SuperResolutionTask, InpaintingTask> op;
    ImageTensor observation;
    double sigma = 0.001;
};

/// The nfe timesteps visited by restore(): uniformly spaced over [T, 1],
/// strictly decreasing, ending at 1.
std::vector<int> sampler_timesteps(int T, int nfe);

/// Conditional reverse diffusion. Alternates noise prediction, x0
/// estimation, the task's closed-form data solution, and a stochastic step
/// toward the next timestep. Deterministic for a fixed seed; the result is
/// clamped to the canonical range.
ImageTensor restore(const RestorationTask& task, const Denoiser& den,
                    const NoiseSchedule& sched, int nfe, uint64_t rng_seed,
                    double rho = 0.5);

}  // namespace diffpad
