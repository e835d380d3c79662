#pragma once

#include "smilefx/errors.hpp"
#include "smilefx/market.hpp"
#include "smilefx/sabr.hpp"
#include "smilefx/transform.hpp"
#include "smilefx/calibrate.hpp"
#include "smilefx/arma_garch.hpp"
#include "smilefx/diagnostics.hpp"
#include "smilefx/dataset.hpp"
#include "smilefx/data_io.hpp"
#include "smilefx/backtest.hpp"
#include "smilefx/strategy.hpp"
#include "smilefx/report_io.hpp"
#include "smilefx/config.hpp"
