#pragma once

#include "spinchain/config.hpp"
#include "spinchain/dynamics.hpp"
#include "spinchain/errors.hpp"
#include "spinchain/experiments.hpp"
#include "spinchain/linalg.hpp"
#include "spinchain/metrics.hpp"
#include "spinchain/model.hpp"
#include "spinchain/run.hpp"
