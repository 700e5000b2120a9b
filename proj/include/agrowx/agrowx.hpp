#pragma once

#include "agrowx/advisor.hpp"
#include "agrowx/calendar.hpp"
#include "agrowx/config.hpp"
#include "agrowx/error.hpp"
#include "agrowx/experiments.hpp"
#include "agrowx/forecast.hpp"
#include "agrowx/geo.hpp"
#include "agrowx/ingest.hpp"
#include "agrowx/model_store.hpp"
#include "agrowx/nn/backprop.hpp"
#include "agrowx/nn/model.hpp"
#include "agrowx/normalization.hpp"
#include "agrowx/preprocess.hpp"
#include "agrowx/stats.hpp"
#include "agrowx/synth.hpp"
#include "agrowx/training.hpp"
#include "agrowx/windowing.hpp"
