#pragma once

#include "baseline.hpp"
#include "bnb.hpp"
#include "catalog.hpp"
#include "config.hpp"
#include "costs.hpp"
#include "enumerate.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "lp.hpp"
#include "model.hpp"
#include "network.hpp"
#include "opt.hpp"
#include "powerflow.hpp"
#include "report.hpp"
#include "scenario.hpp"
