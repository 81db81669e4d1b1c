#pragma once

#include "rigour/salience/criteria_set.hpp"
#include "rigour/salience/io.hpp"
#include "rigour/salience/kendall.hpp"
#include "rigour/salience/scoring.hpp"
#include "rigour/salience/search.hpp"
