#pragma once

#include "rigour/embed/cache.hpp"
#include "rigour/embed/http_provider.hpp"
#include "rigour/embed/mock_provider.hpp"
#include "rigour/embed/pooling.hpp"
#include "rigour/embed/provider.hpp"
#include "rigour/embed/vector.hpp"
