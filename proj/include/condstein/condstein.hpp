#pragma once

#include "condstein/discrepancy.hpp"
#include "condstein/equation.hpp"
#include "condstein/errors.hpp"
#include "condstein/families.hpp"
#include "condstein/measures.hpp"
#include "condstein/operators.hpp"
#include "condstein/oracle.hpp"
#include "condstein/rng.hpp"
#include "condstein/sim.hpp"

namespace condstein {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

}  // namespace condstein
