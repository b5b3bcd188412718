#pragma once

#include "cdm/backtest.hpp"
#include "cdm/dm_core.hpp"
#include "cdm/error.hpp"
#include "cdm/estimators.hpp"
#include "cdm/ingest.hpp"
#include "cdm/special.hpp"
#include "cdm/strategy.hpp"
#include "cdm/synth.hpp"
