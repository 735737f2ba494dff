#pragma once

#include "nlslab/experiments/approximation.hpp"
#include "nlslab/experiments/lp_estimates.hpp"
#include "nlslab/experiments/perturbation.hpp"
#include "nlslab/experiments/schedule.hpp"
#include "nlslab/experiments/weak_wp.hpp"
#include "nlslab/experiments/witness.hpp"
