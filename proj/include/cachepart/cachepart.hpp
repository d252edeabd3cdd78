#pragma once

#include "cachepart/error.hpp"
#include "cachepart/utility.hpp"
#include "cachepart/catalog.hpp"
#include "cachepart/ct.hpp"
#include "cachepart/projected_gradient.hpp"
#include "cachepart/fagin.hpp"
#include "cachepart/optimizer.hpp"
#include "cachepart/lrusim.hpp"
#include "cachepart/onlinectl.hpp"
#include "cachepart/scenario.hpp"
#include "cachepart/csv.hpp"
#include "cachepart/experiments.hpp"
