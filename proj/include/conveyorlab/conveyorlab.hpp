#pragma once

// Umbrella header for the whole library: netlist parsing, MNA solving,
// transfer-function extraction, biquad characterization, sensitivities and
// bias-current tuning.

#include "conveyorlab/biquad.hpp"
#include "conveyorlab/error.hpp"
#include "conveyorlab/extract.hpp"
#include "conveyorlab/linalg.hpp"
#include "conveyorlab/mna.hpp"
#include "conveyorlab/netlist.hpp"
#include "conveyorlab/polynomial.hpp"
#include "conveyorlab/sensitivity.hpp"
#include "conveyorlab/tf.hpp"
#include "conveyorlab/tuning.hpp"

namespace cvl {

inline constexpr const char* kVersion = "1.0.0";

} // namespace cvl
