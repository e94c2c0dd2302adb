// Umbrella header for the crw single-photon transport library.

#pragma once

#include "types.hpp"       // IWYU pragma: export
#include "scattering.hpp"  // IWYU pragma: export
#include "cluster.hpp"     // IWYU pragma: export
#include "oracle.hpp"      // IWYU pragma: export
#include "sweep.hpp"       // IWYU pragma: export
#include "config_io.hpp"   // IWYU pragma: export
#include "table_io.hpp"    // IWYU pragma: export
