#pragma once

#include "fdxlab/error.hpp"
#include "fdxlab/exponents.hpp"
#include "fdxlab/special_functions.hpp"
#include "fdxlab/profiles.hpp"
#include "fdxlab/ulmorrey.hpp"
#include "fdxlab/gronwall.hpp"
#include "fdxlab/solver.hpp"
#include "fdxlab/trace_estimator.hpp"
#include "fdxlab/experiments.hpp"
