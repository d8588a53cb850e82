#pragma once

#include "itelab/error.hpp"
#include "itelab/medium.hpp"
#include "itelab/mode.hpp"
#include "itelab/bessel.hpp"
#include "itelab/radial_ode.hpp"
#include "itelab/dtn.hpp"
#include "itelab/spectra.hpp"
#include "itelab/ite.hpp"
#include "itelab/branch.hpp"
#include "itelab/weyl.hpp"
#include "itelab/symbol.hpp"
#include "itelab/sector.hpp"
#include "itelab/config.hpp"

namespace itelab {

inline constexpr const char* version = "0.1.0";

}  // namespace itelab
