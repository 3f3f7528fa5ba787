#pragma once

// Umbrella header for the elliptrack library: elliptical extended-object
// tracking under a multiplicative measurement-error model, with sequential
// and batch information-form updates plus the simulation and benchmark
// harness.

#include "elliptrack/bench_cli.hpp"
#include "elliptrack/errors.hpp"
#include "elliptrack/gaussian.hpp"
#include "elliptrack/linalg.hpp"
#include "elliptrack/mem.hpp"
#include "elliptrack/memeif.hpp"
#include "elliptrack/memekf_star.hpp"
#include "elliptrack/metrics.hpp"
#include "elliptrack/motion.hpp"
#include "elliptrack/rng.hpp"
#include "elliptrack/simulation.hpp"
