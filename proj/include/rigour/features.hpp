#pragma once

#include "rigour/features/io.hpp"
#include "rigour/features/logistic.hpp"
#include "rigour/features/matrix.hpp"
#include "rigour/features/mutual_information.hpp"
#include "rigour/features/ranking.hpp"
