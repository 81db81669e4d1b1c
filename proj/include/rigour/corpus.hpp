#pragma once

#include "rigour/corpus/io.hpp"
#include "rigour/corpus/metadata.hpp"
#include "rigour/corpus/sections.hpp"
#include "rigour/corpus/sentences.hpp"
#include "rigour/corpus/split.hpp"
#include "rigour/corpus/types.hpp"
