#pragma once
#include "stationary/absorb.hpp"
#include "stationary/amplitude.hpp"
#include "stationary/born.hpp"
#include "stationary/crosssec.hpp"
#include "stationary/freeres.hpp"
#include "stationary/momentum_ls.hpp"
#include "stationary/partialwave.hpp"
#include "stationary/smatrix.hpp"
