#pragma once

#include "esam/arbiter.hpp"
#include "esam/bit_vector.hpp"
#include "esam/convert.hpp"
#include "esam/dataset.hpp"
#include "esam/error.hpp"
#include "esam/memory.hpp"
#include "esam/metrics.hpp"
#include "esam/neuron.hpp"
#include "esam/params.hpp"
#include "esam/tile_engine.hpp"
