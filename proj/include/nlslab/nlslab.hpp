#pragma once

#include "nlslab/cutoffs.hpp"
#include "nlslab/diagnostics.hpp"
#include "nlslab/dynamics.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/experiments.hpp"
#include "nlslab/field.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/multiplier.hpp"
#include "nlslab/report.hpp"
#include "nlslab/rng.hpp"
