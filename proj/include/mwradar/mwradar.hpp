#pragma once

// Umbrella header for the misspecified-Wald MIMO radar detection library.

#include "mwradar/types.hpp"
#include "mwradar/errors.hpp"
#include "mwradar/rng.hpp"
#include "mwradar/special.hpp"
#include "mwradar/innovation.hpp"
#include "mwradar/params.hpp"
#include "mwradar/steering.hpp"
#include "mwradar/clutter.hpp"
#include "mwradar/observation.hpp"
#include "mwradar/likelihood.hpp"
#include "mwradar/estimator.hpp"
#include "mwradar/sandwich.hpp"
#include "mwradar/wald.hpp"
#include "mwradar/campaign.hpp"
#include "mwradar/csv.hpp"
#include "mwradar/config.hpp"
