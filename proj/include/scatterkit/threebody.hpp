#pragma once
#include "threebody/jacobi.hpp"
#include "threebody/separable.hpp"
#include "threebody/faddeev.hpp"
#include "threebody/discrete.hpp"
#include "threebody/channel.hpp"
#include "threebody/tensor.hpp"
