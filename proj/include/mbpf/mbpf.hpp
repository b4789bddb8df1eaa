#pragma once

#include "mbpf/annealing.hpp"
#include "mbpf/baselines.hpp"
#include "mbpf/fairness.hpp"
#include "mbpf/model.hpp"
#include "mbpf/oracle.hpp"
#include "mbpf/radio.hpp"
#include "mbpf/results.hpp"
#include "mbpf/rng.hpp"
#include "mbpf/scenarios.hpp"
#include "mbpf/types.hpp"
#include "mbpf/experiment.hpp"
