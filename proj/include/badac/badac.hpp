#pragma once

// Umbrella header: uncertainty-aware Bayesian classification and anomaly
// ranking, with simulators, metrics, baselines, and the experiment harness.

#include "badac/baselines.hpp"
#include "badac/config.hpp"
#include "badac/core.hpp"
#include "badac/covariance.hpp"
#include "badac/engine.hpp"
#include "badac/errors.hpp"
#include "badac/experiment.hpp"
#include "badac/io.hpp"
#include "badac/logsum.hpp"
#include "badac/metrics.hpp"
#include "badac/rng.hpp"
#include "badac/simulate.hpp"
