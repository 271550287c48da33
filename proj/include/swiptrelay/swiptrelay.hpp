#pragma once

#include "baselines.hpp"
#include "channel.hpp"
#include "common.hpp"
#include "ellipsoid.hpp"
#include "experiment.hpp"
#include "oracle.hpp"
#include "ps.hpp"
#include "summarize.hpp"
#include "tma.hpp"
#include "ubps.hpp"
#include "waterfilling.hpp"
