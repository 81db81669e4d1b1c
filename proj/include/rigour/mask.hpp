#pragma once

#include "rigour/mask/keywords.hpp"
#include "rigour/mask/masking.hpp"
#include "rigour/mask/stopwords.hpp"
