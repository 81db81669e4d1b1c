#pragma once

#include "rigour/certainty/aggregate.hpp"
#include "rigour/certainty/io.hpp"
#include "rigour/certainty/labeling.hpp"
#include "rigour/certainty/providers.hpp"
#include "rigour/certainty/types.hpp"
