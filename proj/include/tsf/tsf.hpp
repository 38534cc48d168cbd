#pragma once

#include "tsf/error.hpp"
#include "tsf/core/date.hpp"
#include "tsf/core/price_series.hpp"
#include "tsf/core/dataset.hpp"
#include "tsf/core/metrics.hpp"
#include "tsf/core/synthetic.hpp"
#include "tsf/stats/differencing.hpp"
#include "tsf/stats/correlogram.hpp"
#include "tsf/stats/adf.hpp"
#include "tsf/arima/nelder_mead.hpp"
#include "tsf/arima/polynomial.hpp"
#include "tsf/arima/arima.hpp"
#include "tsf/baselines/baselines.hpp"
#include "tsf/ad/tensor.hpp"
#include "tsf/ad/tape.hpp"
#include "tsf/ad/ops.hpp"
#include "tsf/ad/loss.hpp"
#include "tsf/ad/params.hpp"
#include "tsf/ad/kernels.hpp"
#include "tsf/ad/optim.hpp"
#include "tsf/ad/checkpoint.hpp"
#include "tsf/ad/lr_finder.hpp"
#include "tsf/forecast/config.hpp"
#include "tsf/forecast/network.hpp"
#include "tsf/forecast/forecaster.hpp"
#include "tsf/harness/experiment.hpp"
#include "tsf/harness/report.hpp"
