#pragma once
#include <stdexcept>
#include <string>

namespace sk {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// precondition on arguments (bad kind, bad range, malformed input)
struct invalid_argument_error : error {
  using error::error;
};

// domain of a special function or operator violated (x <= 0 etc.)
struct domain_error : error {
  using error::error;
};

// radial/momentum grid does not contain the structure it must resolve
struct grid_too_small_error : error {
  using error::error;
};

// wavepacket would reach the box edge within the requested horizon
struct box_too_small_error : error {
  using error::error;
};

// time step too coarse: drift bounds violated
struct step_size_error : error {
  using error::error;
};

// spectral parameter sits on (or too near) a discrete eigenvalue
struct excluded_energy_error : error {
  using error::error;
};

// iteration failed to converge / result not finite
struct numerical_error : error {
  using error::error;
};

// requested horizon exceeds what the discretization can resolve
struct horizon_error : error {
  using error::error;
};

}  // namespace sk
