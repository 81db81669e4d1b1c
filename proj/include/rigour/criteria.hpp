#pragma once

#include "rigour/criteria/chat.hpp"
#include "rigour/criteria/definitions.hpp"
#include "rigour/criteria/registry.hpp"
