#pragma once

#include "rigour/app/config.hpp"
#include "rigour/app/manifest.hpp"
#include "rigour/app/pipeline.hpp"
#include "rigour/app/providers.hpp"
#include "rigour/app/reports.hpp"
#include "rigour/app/stages.hpp"
