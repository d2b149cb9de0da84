#pragma once

#include "lntopo/error.hpp"
#include "lntopo/graph.hpp"
#include "lntopo/ingest.hpp"
#include "lntopo/metrics.hpp"
#include "lntopo/powerlaw.hpp"
#include "lntopo/report.hpp"
#include "lntopo/robustness.hpp"
#include "lntopo/zeta.hpp"
