#pragma once

#include "pprisk/calendar.hpp"
#include "pprisk/csv.hpp"
#include "pprisk/demography.hpp"
#include "pprisk/ensemble.hpp"
#include "pprisk/error.hpp"
#include "pprisk/geogrid.hpp"
#include "pprisk/io/artifacts.hpp"
#include "pprisk/io/dataset.hpp"
#include "pprisk/io/validate.hpp"
#include "pprisk/parallel.hpp"
#include "pprisk/pipeline.hpp"
#include "pprisk/risk.hpp"
#include "pprisk/streamtemp.hpp"
#include "pprisk/synth.hpp"
#include "pprisk/thermal.hpp"
#include "pprisk/watersupply.hpp"
