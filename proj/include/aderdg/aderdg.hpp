#pragma once

#include "aderdg/analysis.hpp"
#include "aderdg/integrator.hpp"
#include "aderdg/io.hpp"
#include "aderdg/linalg.hpp"
#include "aderdg/ode.hpp"
#include "aderdg/predictor.hpp"
#include "aderdg/problems.hpp"
#include "aderdg/scheme_tables.hpp"
#include "aderdg/stability.hpp"
