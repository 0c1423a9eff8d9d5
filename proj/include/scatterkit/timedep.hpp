#pragma once

#include "timedep/cook.hpp"
#include "timedep/eikonal.hpp"
#include "timedep/moller.hpp"
#include "timedep/propagate.hpp"
#include "timedep/smooth.hpp"
#include "timedep/spectral.hpp"
#include "timedep/wavepacket.hpp"
