#pragma once

#include "ppstop/core.hpp"
#include "ppstop/harness.hpp"
#include "ppstop/ingest.hpp"
#include "ppstop/methods.hpp"
#include "ppstop/metrics.hpp"
#include "ppstop/poisson.hpp"
#include "ppstop/random.hpp"
#include "ppstop/ratefit.hpp"
#include "ppstop/report.hpp"
#include "ppstop/simulate.hpp"
