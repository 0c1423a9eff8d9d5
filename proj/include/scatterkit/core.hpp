#pragma once
#include "core/errors.hpp"
#include "core/fft.hpp"
#include "core/grid.hpp"
#include "core/potential.hpp"
#include "core/special.hpp"
#include "core/util.hpp"
