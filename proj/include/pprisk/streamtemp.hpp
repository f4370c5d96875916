#pragma once

#include "pprisk/streamtemp/design.hpp"
#include "pprisk/streamtemp/diagnostics.hpp"
#include "pprisk/streamtemp/impute.hpp"
#include "pprisk/streamtemp/lssvm.hpp"
#include "pprisk/streamtemp/mann_kendall.hpp"
#include "pprisk/streamtemp/metrics.hpp"
#include "pprisk/streamtemp/projection.hpp"
