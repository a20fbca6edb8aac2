#pragma once

#include "satcdn/constellation.hpp"
#include "satcdn/cost.hpp"
#include "satcdn/delivery.hpp"
#include "satcdn/demand.hpp"
#include "satcdn/distance.hpp"
#include "satcdn/geometry.hpp"
#include "satcdn/placement/optimize.hpp"
#include "satcdn/scenario.hpp"
#include "satcdn/snapshot.hpp"
